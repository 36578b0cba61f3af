#include "stencil/lowering.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace stencil {

char direction_char(Direction d) {
  switch (d) {
    case Direction::Forward: return '+';
    case Direction::Backward: return '-';
    case Direction::Any: return '*';
  }
  return '?';
}

std::string Interval::str() const {
  return dim->name + "[" + std::to_string(lower) + "," + std::to_string(upper) + "]";
}

bool operator==(const Interval& a, const Interval& b) {
  return same_dim(a.dim, b.dim) && a.lower == b.lower && a.upper == b.upper && a.region == b.region;
}

std::optional<size_t> IterationSpace::find(const std::string& dim_name) const {
  for (size_t i = 0; i < entries.size(); ++i)
    if (entries[i].dim()->name == dim_name) return i;
  return std::nullopt;
}

std::vector<std::string> IterationSpace::dim_names() const {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.dim()->name);
  return out;
}

std::string IterationSpace::str() const {
  std::string s = "[";
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) s += ", ";
    s += entries[i].interval.str();
    s += direction_char(entries[i].direction);
  }
  return s + "]";
}

std::string DataExtent::str() const {
  if (opaque) return dim->name + "[?]";
  std::string s = dim->name + "[" + std::to_string(lower) + "," + std::to_string(upper) + "]";
  return constant ? s + "c" : s;
}

std::string DataSpace::str() const {
  std::string s;
  for (size_t i = 0; i < summary.size(); ++i) {
    if (i) s += ", ";
    s += summary[i].str();
  }
  return s;
}

std::string Guard::str() const { return dim->name + "%" + std::to_string(factor) + " == 0"; }

std::string LoweredEq::str() const { return "Eq(" + lhs.str() + ", " + rhs.str() + ")"; }

std::string lower_symbol(const std::string& dim) { return dim + "_m"; }
std::string upper_symbol(const std::string& dim) { return dim + "_M"; }

AffineIndex affine_index(const Expr& index) {
  AffineIndex r;
  auto linear = [&](const Expr& term) {
    if (term.is_symbol() && term.node().role == SymbolRole::Index) {
      r.var = term.name();
      r.coeff = Number::integer(1);
      return true;
    }
    if (term.is_mul() && term.size() == 2 && term.operand(0).is_constant() && term.operand(1).is_symbol() &&
        term.operand(1).node().role == SymbolRole::Index) {
      r.var = term.operand(1).name();
      r.coeff = term.operand(0).number();
      return r.coeff.is_exact();
    }
    return false;
  };
  if (index.is_constant()) {
    if (!index.number().is_integral()) return r;
    r.affine = true;
    r.offset = index.number().as_integer();
    return r;
  }
  if (index.is_add()) {
    if (index.size() != 2 || !index.operand(0).is_constant() || !index.operand(0).number().is_integral()) return r;
    r.offset = index.operand(0).number().as_integer();
    r.affine = linear(index.operand(1));
    return r;
  }
  r.affine = linear(index);
  return r;
}

namespace {

DimPtr loop_dim_of(const DimPtr& d) {
  if (d->kind == DimKind::Stepping || d->kind == DimKind::Conditional) return d->parent;
  return d;
}

// Index symbols carry their dimension; fall back to the accessed functions.
DimPtr resolve(const Expr& sym, const Expr& context) {
  if (sym.dim()) return loop_dim_of(sym.dim());
  DimPtr found;
  visit(context, [&](const Expr& n) {
    if (found) return false;
    if (n.is_access())
      for (const auto& d : n.function()->dims) {
        DimPtr ld = loop_dim_of(d);
        if (ld->name == sym.name()) found = ld;
      }
    return !found;
  });
  if (!found) throw std::logic_error("cannot resolve index variable " + sym.name());
  return found;
}

void index_symbols(const Expr& e, std::vector<Expr>& out) {
  visit(e, [&](const Expr& n) {
    if (n.is_symbol() && n.node().role == SymbolRole::Index &&
        std::none_of(out.begin(), out.end(), [&](const Expr& o) { return o.name() == n.name(); }))
      out.push_back(n);
    return true;
  });
}

}  // namespace

std::vector<DimPtr> index_dims(const Expr& a) {
  std::vector<DimPtr> out;
  for (const auto& idx : a.operands()) {
    std::vector<Expr> syms;
    index_symbols(idx, syms);
    for (const auto& s : syms) {
      DimPtr d = resolve(s, a);
      if (std::none_of(out.begin(), out.end(), [&](const DimPtr& o) { return o->name == d->name; }))
        out.push_back(d);
    }
  }
  return out;
}

LoweredEq indexify(const Equation& eq) {
  auto to_array = [](const Expr& e) {
    return transform(e, [](const Expr& n) -> Expr { return n.is_access() ? indexify_access(n) : Expr(); }, false);
  };
  LoweredEq out;
  out.lhs = to_array(eq.lhs);
  out.rhs = to_array(eq.rhs);
  out.is_increment = eq.is_increment;
  out.region = eq.region;

  // Conditional dimensions: ts -> t/f under the guard t % f == 0.
  Substitutions subs;
  auto scan = [&](const Expr& e) {
    visit(e, [&](const Expr& n) {
      if (!n.is_access()) return true;
      for (const auto& d : n.function()->dims) {
        if (d->kind != DimKind::Conditional) continue;
        subs[symbol(d->name, SymbolRole::Index)] = index_of(d->parent) * rational(1, d->factor);
        Guard g{d->parent, d->factor};
        if (std::find(out.guards.begin(), out.guards.end(), g) == out.guards.end()) out.guards.push_back(g);
      }
      return true;
    });
  };
  scan(out.lhs);
  scan(out.rhs);
  if (!subs.empty()) {
    out.lhs = substitute(out.lhs, subs);
    out.rhs = substitute(out.rhs, subs);
  }
  return out;
}

namespace {

Expr shift_indices(const Expr& e, int sign) {
  return transform(e, [sign](const Expr& n) -> Expr {
    if (!n.is_access()) return {};
    const auto& fn = n.function();
    std::vector<Expr> idx = n.operands();
    bool changed = false;
    for (size_t i = 0; i < idx.size(); ++i) {
      int off = fn->offset(i);
      if (off == 0) continue;
      idx[i] = idx[i] + integer(sign * off);
      changed = true;
    }
    return changed ? access(fn, std::move(idx), true) : Expr();
  });
}

}  // namespace

Expr align_expr(const Expr& e) { return shift_indices(e, 1); }
Expr unalign_expr(const Expr& e) { return shift_indices(e, -1); }

LoweredEq align_domain(const LoweredEq& eq) {
  if (eq.aligned) return eq;
  LoweredEq out = eq;
  out.lhs = align_expr(eq.lhs);
  out.rhs = align_expr(eq.rhs);
  out.aligned = true;
  return out;
}

namespace {

struct AccessRef {
  Expr access;
  bool write;
};

std::vector<AccessRef> gather_accesses(const LoweredEq& eq) {
  std::vector<AccessRef> out;
  if (eq.lhs.is_access()) {
    out.push_back({eq.lhs, true});
    for (const auto& idx : eq.lhs.operands())
      for (const auto& a : collect_accesses(idx)) out.push_back({a, false});
  }
  for (const auto& a : collect_accesses(eq.rhs)) out.push_back({a, false});
  return out;
}

// Unaligned offset of position i of an access.
int64_t raw_offset(const Expr& a, size_t i, bool aligned, const AffineIndex& ai) {
  return ai.offset - (aligned ? a.function()->offset(i) : 0);
}

}  // namespace

LoweredEq analyze(const LoweredEq& in) {
  LoweredEq eq = in;
  eq.ispace = {};
  eq.dspace = {};
  eq.inputs.clear();
  eq.outputs.clear();
  eq.diagnostics.clear();
  auto refs = gather_accesses(eq);

  auto note = [](std::vector<std::string>& v, const std::string& n) {
    if (std::find(v.begin(), v.end(), n) == v.end()) v.push_back(n);
  };
  note(eq.outputs, eq.lhs.name());
  for (const auto& r : refs)
    if (!r.write) note(eq.inputs, r.access.name());
  {
    visit(eq.rhs, [&](const Expr& n) {
      if (n.is_symbol() && n.node().role == SymbolRole::Temp) note(eq.inputs, n.name());
      return true;
    });
  }

  // Iteration dimensions, ordered topologically by their appearance in each
  // access; ties go to the first appearance.
  std::vector<DimPtr> order;
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& r : refs) {
    auto dims = index_dims(r.access);
    for (const auto& d : dims)
      if (std::none_of(order.begin(), order.end(), [&](const DimPtr& o) { return o->name == d->name; }))
        order.push_back(d);
    for (size_t i = 0; i + 1 < dims.size(); ++i) edges.insert({dims[i]->name, dims[i + 1]->name});
  }
  std::vector<DimPtr> sorted;
  std::vector<bool> done(order.size(), false);
  while (sorted.size() < order.size()) {
    bool progressed = false;
    for (size_t i = 0; i < order.size(); ++i) {
      if (done[i]) continue;
      bool ready = true;
      for (size_t j = 0; j < order.size(); ++j)
        if (!done[j] && j != i && edges.count({order[j]->name, order[i]->name})) ready = false;
      if (!ready) continue;
      done[i] = true;
      sorted.push_back(order[i]);
      progressed = true;
      break;
    }
    if (!progressed) {
      // Cyclic appearance order: fall back to first appearance.
      for (size_t i = 0; i < order.size(); ++i)
        if (!done[i]) {
          done[i] = true;
          sorted.push_back(order[i]);
        }
      eq.diagnostics.push_back("inconsistent dimension order; using first appearance");
    }
  }
  for (const auto& d : sorted) {
    IterEntry e;
    e.interval.dim = d;
    if (eq.region == Region::Interior && d->kind == DimKind::Space) e.interval.region = Region::Interior;
    eq.ispace.entries.push_back(e);
  }

  // Local directions from self flow dependences.
  if (eq.lhs.is_access()) {
    std::map<std::string, std::set<Direction>> wanted;
    for (const auto& r : refs) {
      if (r.write || r.access.name() != eq.lhs.name()) continue;
      std::vector<int64_t> dist(eq.ispace.size(), 0);
      bool usable = true;
      for (size_t i = 0; i < r.access.size() && usable; ++i) {
        auto w = affine_index(eq.lhs.operand(i)), rd = affine_index(r.access.operand(i));
        if (!w.affine || !rd.affine || w.var != rd.var || !(w.coeff == rd.coeff)) {
          usable = false;
          break;
        }
        if (w.var.empty()) {
          if (w.offset != rd.offset) usable = false;  // never the same element
          continue;
        }
        Number q = Number::integer(w.offset - rd.offset) / w.coeff;
        if (!q.is_integral()) {
          usable = false;
          break;
        }
        auto pos = eq.ispace.find(w.var);
        if (pos) dist[*pos] = q.as_integer();
      }
      if (!usable) continue;
      for (size_t k = 0; k < dist.size(); ++k) {
        if (dist[k] == 0) continue;
        wanted[eq.ispace.entries[k].dim()->name].insert(dist[k] > 0 ? Direction::Forward : Direction::Backward);
        break;
      }
    }
    for (auto& e : eq.ispace.entries) {
      auto it = wanted.find(e.dim()->name);
      if (it == wanted.end()) continue;
      if (it->second.size() == 1) {
        e.direction = *it->second.begin();
      } else {
        eq.diagnostics.push_back("equation requires both directions along " + e.dim()->name);
      }
    }
  }

  // Data space.
  std::map<std::string, Interval> hull;
  for (const auto& e : eq.ispace.entries) {
    Interval iv = e.interval;
    hull[e.dim()->name] = iv;
  }
  for (const auto& r : refs) {
    const auto& fn = r.access.function();
    auto& ext = eq.dspace.functions[fn->name];
    bool fresh = ext.empty();
    if (fresh) ext.resize(fn->ndim());
    for (size_t i = 0; i < r.access.size(); ++i) {
      DataExtent cur;
      cur.dim = fn->dims[i];
      auto ai = affine_index(r.access.operand(i));
      if (!ai.affine) {
        cur.opaque = true;
      } else if (ai.var.empty()) {
        cur.constant = true;
        cur.lower = cur.upper = raw_offset(r.access, i, eq.aligned, ai);
      } else {
        int64_t off = raw_offset(r.access, i, eq.aligned, ai);
        auto pos = eq.ispace.find(ai.var);
        int64_t shrink = (pos && eq.ispace.entries[*pos].interval.region == Region::Interior) ? 1 : 0;
        cur.lower = off + shrink;
        cur.upper = off - shrink;
        bool skip_summary = !r.write && fn->modulo(i) > 0;
        if (pos && !skip_summary && ai.coeff.is_one()) {
          auto& h = hull[ai.var];
          h.lower = std::min(h.lower, cur.lower);
          h.upper = std::max(h.upper, cur.upper);
        }
        // Halo reach check on grid functions.
        if (fn->kind != FunctionKind::TempArray && fn->dims[i]->kind == DimKind::Space) {
          int64_t reach = std::max(-off, off) - shrink;
          if (reach > fn->offset(i))
            throw std::invalid_argument("access " + r.access.str() + " reaches " + std::to_string(reach) +
                                        " points beyond the domain but '" + fn->name + "' has halo " +
                                        std::to_string(fn->offset(i)));
        }
      }
      auto& slot = ext[i];
      if (fresh) {
        slot = cur;
      } else if (slot.opaque || cur.opaque) {
        slot.opaque = true;
      } else {
        slot.lower = std::min(slot.lower, cur.lower);
        slot.upper = std::max(slot.upper, cur.upper);
        slot.constant = slot.constant && cur.constant;
      }
    }
  }
  for (const auto& e : eq.ispace.entries) eq.dspace.summary.push_back(hull[e.dim()->name]);
  return eq;
}

std::vector<LoweredEq> lower(const std::vector<Equation>& eqs, const Substitutions& subs) {
  std::vector<LoweredEq> out;
  for (size_t i = 0; i < eqs.size(); ++i) {
    LoweredEq le = indexify(eqs[i]);
    if (!subs.empty()) {
      le.lhs = substitute(le.lhs, subs);
      le.rhs = substitute(le.rhs, subs);
    }
    le = analyze(align_domain(le));
    le.id = static_cast<int>(i);
    out.push_back(std::move(le));
  }
  return out;
}

std::map<std::string, DimBounds> access_bounds(const std::vector<LoweredEq>& eqs) {
  std::map<std::string, DimBounds> out;
  auto tighten_lo = [&](const std::string& d, int64_t v) {
    auto& b = out[d];
    b.lo = b.lo ? std::max(*b.lo, v) : v;
  };
  auto tighten_hi = [&](const std::string& d, int64_t v) {
    auto& b = out[d];
    b.hi = b.hi ? std::min(*b.hi, v) : v;
  };
  auto floor_q = [](const Number& q) -> int64_t {
    if (!q.is_exact()) return static_cast<int64_t>(std::floor(q.value()));
    return q.num() >= 0 ? q.num() / q.den() : -((-q.num() + q.den() - 1) / q.den());
  };
  auto ceil_q = [&](const Number& q) -> int64_t { return -floor_q(-q); };
  for (const auto& eq : eqs) {
    std::vector<AccessRef> refs = gather_accesses(eq);
    for (const auto& r : refs) {
      const auto& fn = r.access.function();
      for (size_t i = 0; i < r.access.size(); ++i) {
        if (fn->modulo(i) > 0) continue;
        auto ai = affine_index(r.access.operand(i));
        if (!ai.affine || ai.var.empty() || ai.coeff.is_negative()) continue;
        int64_t base = eq.aligned ? 0 : fn->offset(i);
        int64_t lo_allowed = -base, hi_allowed = fn->allocated(i) - 1 - base;
        auto pos = eq.ispace.find(ai.var);
        int64_t shrink = (pos && eq.ispace.entries[*pos].interval.region == Region::Interior) ? 1 : 0;
        int64_t ext_lo = pos ? eq.ispace.entries[*pos].interval.lower : 0;
        int64_t ext_hi = pos ? eq.ispace.entries[*pos].interval.upper : 0;
        int factor = 1;
        for (const auto& g : eq.guards)
          if (g.dim->name == ai.var) factor = g.factor;
        // c*v + k within [lo_allowed, hi_allowed]
        Number c = ai.coeff;
        int64_t vmax = floor_q(Number::integer(hi_allowed - ai.offset) / c);
        int64_t vmin = ceil_q(Number::integer(lo_allowed - ai.offset) / c);
        if (factor > 1 && (Number::integer(factor) * c).is_one()) vmax += factor - 1;
        tighten_lo(ai.var, vmin - shrink - ext_lo);
        tighten_hi(ai.var, vmax + shrink - ext_hi);
      }
    }
  }
  return out;
}

}  // namespace stencil
