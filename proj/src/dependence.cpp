#include "stencil/dependence.hpp"

#include <map>
#include <sstream>

namespace stencil {

std::string to_string(DepKind k) {
  switch (k) {
    case DepKind::Flow: return "flow";
    case DepKind::Anti: return "anti";
    case DepKind::Output: return "output";
  }
  return "?";
}

bool Dependence::carried() const { return carried_by().has_value(); }

std::optional<std::string> Dependence::carried_by() const {
  for (size_t i = 0; i < distance.size(); ++i)
    if (!distance[i] || *distance[i] != 0) return dims[i];
  return std::nullopt;
}

std::string Dependence::str() const {
  std::ostringstream os;
  os << to_string(kind) << " " << function << ": e" << source << " -> e" << sink << " (";
  for (size_t i = 0; i < distance.size(); ++i) {
    if (i) os << ",";
    os << dims[i] << "=";
    if (distance[i])
      os << *distance[i];
    else
      os << "?";
  }
  os << ")";
  if (is_reduction) os << " reduction";
  return os.str();
}

std::vector<Dependence> DependenceSet::all() const {
  std::vector<Dependence> out = flow;
  out.insert(out.end(), anti.begin(), anti.end());
  out.insert(out.end(), output.begin(), output.end());
  return out;
}

namespace {

void index_vars(const Expr& e, std::set<std::string>& out) {
  visit(e, [&](const Expr& n) {
    if (n.is_symbol() && n.node().role == SymbolRole::Index) out.insert(n.name());
    return true;
  });
}

}  // namespace

std::optional<std::vector<Distance>> distance_vector(const Expr& a, const Expr& b,
                                                     const std::vector<std::string>& dims) {
  std::map<std::string, int64_t> fixed;
  std::set<std::string> unknown;
  if (a.is_access() && b.is_access()) {
    for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
      auto x = affine_index(a.operand(i)), y = affine_index(b.operand(i));
      if (x.affine && y.affine) {
        if (x.var.empty() && y.var.empty()) {
          if (x.offset != y.offset) return std::nullopt;
          continue;
        }
        if (x.var == y.var && x.coeff == y.coeff) {
          Number q = Number::integer(x.offset - y.offset) / x.coeff;
          if (!q.is_integral()) return std::nullopt;
          int64_t d = q.as_integer();
          auto it = fixed.find(x.var);
          if (it != fixed.end() && it->second != d) return std::nullopt;
          fixed[x.var] = d;
          continue;
        }
      }
      index_vars(a.operand(i), unknown);
      index_vars(b.operand(i), unknown);
    }
  }
  std::vector<Distance> out;
  for (const auto& d : dims) {
    auto it = fixed.find(d);
    if (it != fixed.end())
      out.push_back(it->second);
    else
      out.push_back(std::nullopt);
  }
  return out;
}

LamportResult lamport_test(const Expr& a, const Expr& b, const std::string& dim) {
  auto v = distance_vector(a, b, {dim});
  if (!v) return {LamportResult::NoDep, 0};
  if (!(*v)[0]) return {LamportResult::Unknown, 0};
  return {LamportResult::Value, *(*v)[0]};
}

bool is_increment_access(const LoweredEq& eq, const Expr& access) { return eq.is_increment && access == eq.lhs; }

namespace {

struct Ref {
  Expr node;
  bool write;
};

bool is_temp_symbol(const Expr& e) { return e.is_symbol() && e.node().role == SymbolRole::Temp; }

std::vector<Ref> refs_of(const LoweredEq& eq) {
  std::vector<Ref> out;
  out.push_back({eq.lhs, true});
  if (eq.lhs.is_access())
    for (const auto& idx : eq.lhs.operands())
      for (const auto& a : collect_accesses(idx)) out.push_back({a, false});
  visit(eq.rhs, [&](const Expr& n) {
    if (n.is_access() || is_temp_symbol(n)) out.push_back({n, false});
    return true;
  });
  return out;
}

std::vector<std::string> common_dims(const LoweredEq& a, const LoweredEq& b) {
  std::vector<std::string> out;
  for (const auto& e : a.ispace.entries)
    if (b.ispace.find(e.dim()->name)) out.push_back(e.dim()->name);
  return out;
}

DepKind kind_of(bool first_writes, bool second_writes) {
  if (first_writes && second_writes) return DepKind::Output;
  return first_writes ? DepKind::Flow : DepKind::Anti;
}

void pair_deps(const LoweredEq& e1, const Ref& x, const LoweredEq& e2, const Ref& y, bool same_eq,
               std::vector<Dependence>& out) {
  if (!x.write && !y.write) return;
  if (x.node.name() != y.node.name()) return;
  auto dims = common_dims(e1, e2);
  std::vector<Distance> D;
  if (is_temp_symbol(x.node) || !x.node.is_access()) {
    // Scalar temporaries are defined before use in every iteration.
    D.assign(dims.size(), int64_t{0});
  } else {
    auto v = distance_vector(x.node, y.node, dims);
    if (!v) return;
    D = *v;
  }
  int lead = 0;  // +1: x first, -1: y first, 0: both orders possible
  bool all_zero = true;
  for (const auto& d : D) {
    if (d && *d == 0) continue;
    all_zero = false;
    lead = d ? (*d > 0 ? 1 : -1) : 0;
    break;
  }
  if (all_zero) lead = (same_eq && !x.write) ? 1 : (same_eq ? -1 : 1);
  bool reduction = is_increment_access(e1, x.node) && is_increment_access(e2, y.node);
  auto emit = [&](bool x_first) {
    Dependence dep;
    const Ref& f = x_first ? x : y;
    const Ref& s = x_first ? y : x;
    dep.kind = kind_of(f.write, s.write);
    dep.source = x_first ? e1.id : e2.id;
    dep.sink = x_first ? e2.id : e1.id;
    dep.function = x.node.name();
    dep.source_access = f.node;
    dep.sink_access = s.node;
    dep.dims = dims;
    for (const auto& d : D) dep.distance.push_back(d ? Distance(x_first ? *d : -*d) : Distance());
    for (size_t i = 0; i < D.size(); ++i)
      if (!D[i] || *D[i] != 0) dep.cause.insert(dims[i]);
    dep.is_reduction = reduction;
    out.push_back(std::move(dep));
  };
  if (lead >= 0) emit(true);
  if (lead <= 0) emit(false);
}

void eq_pair(const LoweredEq& e1, const LoweredEq& e2, bool same, std::vector<Dependence>& out) {
  auto r1 = refs_of(e1), r2 = refs_of(e2);
  for (size_t i = 0; i < r1.size(); ++i)
    for (size_t j = same ? i + 1 : 0; j < r2.size(); ++j) pair_deps(e1, r1[i], e2, r2[j], same, out);
}

void sort_into(const std::vector<Dependence>& deps, DependenceSet& set) {
  for (const auto& d : deps) {
    switch (d.kind) {
      case DepKind::Flow: set.flow.push_back(d); break;
      case DepKind::Anti:
        if (!d.is_reduction) set.anti.push_back(d);
        break;
      case DepKind::Output: set.output.push_back(d); break;
    }
  }
}

}  // namespace

DependenceSet get_dependences(const std::vector<LoweredEq>& a, const std::vector<LoweredEq>& b) {
  std::vector<Dependence> deps;
  for (const auto& x : a)
    for (const auto& y : b) eq_pair(x, y, false, deps);
  DependenceSet set;
  sort_into(deps, set);
  return set;
}

std::vector<Dependence> all_dependences(const std::vector<LoweredEq>& eqs) {
  std::vector<Dependence> deps;
  for (size_t i = 0; i < eqs.size(); ++i)
    for (size_t j = i; j < eqs.size(); ++j) eq_pair(eqs[i], eqs[j], i == j, deps);
  return deps;
}

}  // namespace stencil
