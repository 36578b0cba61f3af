#include "stencil/symbolic.hpp"

#include <algorithm>
#include <stdexcept>

namespace stencil {

Equation make_eq(const Expr& lhs, const Expr& rhs, Region region) {
  if (!lhs.is_access()) throw std::invalid_argument("equation lhs must be a function access, got " + lhs.str());
  Equation eq;
  eq.lhs = lhs;
  eq.rhs = rhs;
  eq.region = region;
  return eq;
}

std::string to_string(const Equation& eq) { return "Eq(" + eq.lhs.str() + ", " + eq.rhs.str() + ")"; }

std::vector<Number> fd_weights(int deriv_order, const std::vector<int>& offsets) {
  if (offsets.empty()) throw std::invalid_argument("fd_weights needs at least one point");
  const int n = static_cast<int>(offsets.size()) - 1;
  const int m = deriv_order;
  if (m > n) throw std::invalid_argument("not enough points for derivative order " + std::to_string(m));
  auto X = [&](int i) { return Number::integer(offsets[i]); };
  // c[i][k]: weight of point i for derivative k.
  std::vector<std::vector<Number>> c(n + 1, std::vector<Number>(m + 1, Number::integer(0)));
  Number c1 = Number::integer(1), c4 = X(0);
  c[0][0] = Number::integer(1);
  for (int i = 1; i <= n; ++i) {
    int mn = std::min(i, m);
    Number c2 = Number::integer(1), c5 = c4;
    c4 = X(i);
    for (int j = 0; j < i; ++j) {
      Number c3 = X(i) - X(j);
      c2 = c2 * c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (Number::integer(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - Number::integer(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<Number> w;
  for (int i = 0; i <= n; ++i) w.push_back(c[i][m]);
  return w;
}

std::vector<int> centered_offsets(int fd_order) {
  std::vector<int> out;
  for (int k = -fd_order / 2; k <= fd_order / 2; ++k) out.push_back(k);
  return out;
}

namespace {

bool matches(const Dimension& fdim, const Dimension& dim) {
  if (dim.kind == DimKind::Time) return (fdim.kind == DimKind::Time || fdim.kind == DimKind::Stepping) &&
                                        fdim.root().name == dim.name;
  return fdim.kind == dim.kind && fdim.name == dim.name;
}

bool accesses_dim(const Expr& e, const DimPtr& dim) {
  bool found = false;
  visit(e, [&](const Expr& n) {
    if (n.is_access())
      for (const auto& d : n.function()->dims)
        if (matches(*d, *dim)) found = true;
    return !found;
  });
  return found;
}

}  // namespace

Expr shift(const Expr& e, const DimPtr& dim, int k) {
  if (k == 0) return e;
  return transform(
      e,
      [&](const Expr& n) -> Expr {
        if (!n.is_access()) return {};
        const auto& fn = n.function();
        std::vector<Expr> idx = n.operands();
        bool changed = false;
        for (size_t i = 0; i < idx.size(); ++i) {
          if (!matches(*fn->dims[i], *dim)) continue;
          idx[i] = n.array_form() ? idx[i] + k : idx[i] + integer(k) * symbol(dim->spacing);
          changed = true;
        }
        return changed ? access(fn, std::move(idx), n.array_form()) : Expr();
      },
      false);
}

Expr derivative(const Expr& e, const DimPtr& dim, int fd_order, int deriv_order) {
  if (fd_order < 2 || fd_order % 2 != 0)
    throw std::invalid_argument("fd_order must be even and >= 2, got " + std::to_string(fd_order));
  if (deriv_order < 1) throw std::invalid_argument("derivative order must be >= 1");
  if (fd_order < deriv_order)
    throw std::invalid_argument("fd_order " + std::to_string(fd_order) + " is too low for derivative order " +
                                std::to_string(deriv_order));
  if (!accesses_dim(e, dim)) throw std::invalid_argument("unknown dimension " + dim->name);
  auto offsets = centered_offsets(fd_order);
  auto w = fd_weights(deriv_order, offsets);
  Expr scale = pow(symbol(dim->spacing), -deriv_order);
  std::vector<Expr> terms;
  for (size_t i = 0; i < offsets.size(); ++i) {
    if (w[i].is_zero()) continue;
    terms.push_back(mul({constant(w[i]), scale, shift(e, dim, offsets[i])}));
  }
  return add(std::move(terms));
}

int space_order_of(const Expr& e) {
  int so = 0;
  visit(e, [&](const Expr& n) {
    if (n.is_access() && (n.function()->kind == FunctionKind::Function ||
                          n.function()->kind == FunctionKind::TimeFunction))
      so = std::max(so, n.function()->space_order);
    return true;
  });
  return so;
}

int time_order_of(const Expr& e) {
  int to = 0;
  visit(e, [&](const Expr& n) {
    if (n.is_access()) to = std::max(to, n.function()->time_order);
    return true;
  });
  return to;
}

GridPtr grid_of(const Expr& e) {
  GridPtr g;
  visit(e, [&](const Expr& n) {
    if (!g && n.is_access() && n.function()->grid) g = n.function()->grid;
    return !g;
  });
  return g;
}

Expr laplace(const Expr& e) {
  GridPtr g = grid_of(e);
  if (!g) throw std::invalid_argument("laplace needs a grid function");
  int so = std::max(2, space_order_of(e));
  std::vector<Expr> terms;
  for (const auto& d : g->dims) terms.push_back(derivative(e, d, so, 2));
  return add(std::move(terms));
}

Expr apply_suffix(const Expr& e, const std::string& suffix) {
  if (suffix == "laplace") return laplace(e);
  GridPtr g = grid_of(e);
  if (!g) throw std::invalid_argument("." + suffix + " needs a grid function");
  if (suffix == "forward") return shift(e, g->time, 1);
  if (suffix == "backward") return shift(e, g->time, -1);
  if (suffix.size() >= 2 && suffix[0] == 'd') {
    std::string name = suffix.substr(1);
    int order = 1;
    if (name.size() > 1 && name.back() == '2') {
      name.pop_back();
      order = 2;
    }
    if (name == g->time->name) {
      int to = time_order_of(e);
      int fd = std::max(2, to + (to % 2));
      return derivative(e, g->time, fd, order);
    }
    auto pos = g->index_of(name);
    if (!pos) throw std::invalid_argument("unknown dimension " + name);
    return derivative(e, g->dims[*pos], std::max(2, space_order_of(e)), order);
  }
  throw std::invalid_argument("unknown suffix ." + suffix);
}

namespace {

// e == a*target + b
struct Affine {
  Expr a, b;
};

Affine decompose(const Expr& e, const Expr& target) {
  if (e == target) return {integer(1), integer(0)};
  if (!contains(e, target)) return {integer(0), e};
  switch (e.kind()) {
    case ExprKind::Add: {
      std::vector<Expr> as, bs;
      for (const auto& t : e.operands()) {
        auto r = decompose(t, target);
        as.push_back(r.a);
        bs.push_back(r.b);
      }
      return {add(std::move(as)), add(std::move(bs))};
    }
    case ExprKind::Mul: {
      int which = -1;
      for (size_t i = 0; i < e.size(); ++i) {
        if (!contains(e.operand(i), target)) continue;
        if (which >= 0) throw std::invalid_argument("target " + target.str() + " occurs non-linearly");
        which = static_cast<int>(i);
      }
      std::vector<Expr> rest;
      for (size_t i = 0; i < e.size(); ++i)
        if (static_cast<int>(i) != which) rest.push_back(e.operand(i));
      Expr r = mul(std::move(rest));
      auto inner = decompose(e.operand(which), target);
      return {mul({r, inner.a}), mul({r, inner.b})};
    }
    default:
      throw std::invalid_argument("target " + target.str() + " occurs non-linearly");
  }
}

}  // namespace

Expr solve_for(const Expr& e, const Expr& target) {
  if (!contains(e, target)) throw std::invalid_argument("target " + target.str() + " does not occur in expression");
  auto [a, b] = decompose(e, target);
  if (a.is_constant() && a.number().is_zero())
    throw std::invalid_argument("target " + target.str() + " cancels out of the expression");
  Expr r = expand(mul({integer(-1), b, pow(a, -1)}));
  if (contains(r, target)) throw std::invalid_argument("target " + target.str() + " occurs non-linearly");
  return r;
}

Expr indexify_index(const Expr& index, const DimPtr& dim) {
  Expr var = index_of(dim->kind == DimKind::Stepping ? dim->parent : dim);
  Expr diff = index - var;
  auto fail = [&]() -> Expr {
    throw std::invalid_argument("index " + index.str() + " is not " + dim->name + " plus a multiple of " +
                                (dim->spacing.empty() ? std::string("1") : dim->spacing));
  };
  if (!has_symbol(index, dim->name)) fail();
  if (diff.is_constant()) {
    if (!diff.number().is_integral()) fail();
    // Sparse point indices carry integer offsets directly.
    if (!dim->spacing.empty() && !diff.number().is_zero()) fail();
    return index;
  }
  if (dim->spacing.empty()) fail();
  Expr steps = diff * pow(symbol(dim->spacing), -1);
  if (!steps.is_constant() || !steps.number().is_integral()) fail();
  return var + integer(steps.number().as_integer());
}

Expr indexify_access(const Expr& a) {
  if (!a.is_access() || a.array_form()) return a;
  const auto& fn = a.function();
  std::vector<Expr> idx;
  for (size_t i = 0; i < a.size(); ++i) idx.push_back(indexify_index(a.operand(i), fn->dims[i]));
  return access(fn, std::move(idx), true);
}

namespace {

struct Corners {
  std::vector<Expr> base;  // floor((c - o)/h) per space dim
  std::vector<Expr> frac;  // (c - o - h*base)/h per space dim
};

Corners corner_geometry(const FunctionPtr& sparse) {
  if (!sparse || !sparse->is_sparse()) throw std::invalid_argument("inject/interpolate needs a sparse function");
  const auto& g = sparse->grid;
  Expr p = index_of(sparse->dims[1]);
  Corners c;
  for (size_t d = 0; d < g->ndim(); ++d) {
    Expr coord = access(sparse->coords, {p, integer(static_cast<int64_t>(d))}, true);
    Expr o = symbol(g->origin_symbol(d)), h = symbol(g->spacing_symbol(d));
    Expr base = call("floor", {(coord - o) / h});
    c.base.push_back(base);
    c.frac.push_back((coord - o - h * base) / h);
  }
  return c;
}

// Evaluate `e` at a corner: grid-function space indices are replaced by the
// corner position, the rest is indexified.
Expr at_corner(const Expr& e, const GridPtr& g, const std::vector<Expr>& pos) {
  return transform(
      e,
      [&](const Expr& n) -> Expr {
        if (!n.is_access() || n.array_form()) return {};
        const auto& fn = n.function();
        std::vector<Expr> idx;
        for (size_t i = 0; i < n.size(); ++i) {
          const auto& d = fn->dims[i];
          auto sd = d->kind == DimKind::Space ? g->index_of(d->name) : std::nullopt;
          if (sd) {
            Expr var = symbol(d->name, SymbolRole::Index);
            Expr off = indexify_index(n.operand(i), d) - var;
            idx.push_back(pos[*sd] + off);
          } else {
            idx.push_back(indexify_index(n.operand(i), d));
          }
        }
        return access(fn, std::move(idx), true);
      },
      false);
}

std::vector<std::vector<int>> corner_offsets(size_t ndim) {
  std::vector<std::vector<int>> out;
  for (size_t mask = 0; mask < (1u << ndim); ++mask) {
    std::vector<int> k;
    for (size_t d = 0; d < ndim; ++d) k.push_back((mask >> d) & 1);
    out.push_back(k);
  }
  return out;
}

Expr corner_weight(const Corners& c, const std::vector<int>& k) {
  std::vector<Expr> fs;
  for (size_t d = 0; d < k.size(); ++d) fs.push_back(k[d] ? c.frac[d] : integer(1) - c.frac[d]);
  return mul(std::move(fs));
}

}  // namespace

std::vector<Equation> inject(const FunctionPtr& src, const Expr& field, const Expr& expr) {
  if (!field.is_access() || !field.function()->has_time() || field.function()->is_sparse())
    throw std::invalid_argument("inject field must be a time-function access");
  auto geom = corner_geometry(src);
  const auto& g = src->grid;
  std::vector<Equation> out;
  for (const auto& k : corner_offsets(g->ndim())) {
    std::vector<Expr> pos;
    for (size_t d = 0; d < k.size(); ++d) pos.push_back(geom.base[d] + k[d]);
    Expr lhs = at_corner(field, g, pos);
    Expr rhs = lhs + corner_weight(geom, k) * at_corner(expr, g, pos);
    Equation eq = make_eq(lhs, rhs);
    eq.is_increment = true;
    out.push_back(eq);
  }
  return out;
}

std::vector<Equation> interpolate(const FunctionPtr& dst, const Expr& field_expr) {
  auto geom = corner_geometry(dst);
  const auto& g = dst->grid;
  std::vector<Expr> terms;
  for (const auto& k : corner_offsets(g->ndim())) {
    std::vector<Expr> pos;
    for (size_t d = 0; d < k.size(); ++d) pos.push_back(geom.base[d] + k[d]);
    terms.push_back(corner_weight(geom, k) * at_corner(field_expr, g, pos));
  }
  Expr lhs = access(dst, {index_of(dst->dims[0]), index_of(dst->dims[1])}, true);
  return {make_eq(lhs, add(std::move(terms)))};
}

}  // namespace stencil
