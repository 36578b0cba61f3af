#include "stencil/dse.hpp"

#include <algorithm>
#include <regex>
#include <stdexcept>

namespace stencil {

std::string to_string(DseMode m) {
  switch (m) {
    case DseMode::Basic: return "basic";
    case DseMode::Advanced: return "advanced";
    case DseMode::Aggressive: return "aggressive";
  }
  return "?";
}

DseMode parse_dse_mode(const std::string& s) {
  if (s == "basic") return DseMode::Basic;
  if (s == "advanced") return DseMode::Advanced;
  if (s == "aggressive") return DseMode::Aggressive;
  throw std::invalid_argument("unknown dse mode '" + s + "' (expected basic, advanced or aggressive)");
}

TempNamer::TempNamer(const std::vector<Cluster>& existing) {
  static const std::regex pat("temp([0-9]+)");
  auto see = [&](const std::string& n) {
    std::smatch m;
    if (std::regex_match(n, m, pat)) counter_ = std::max(counter_, std::stoi(m[1]) + 1);
  };
  for (const auto& c : existing)
    for (const auto& e : c.eqs) {
      see(e.lhs.name());
      visit(e.rhs, [&](const Expr& n) {
        if (n.is_symbol() || n.is_access()) see(n.name());
        return true;
      });
    }
}

std::string TempNamer::next() { return "temp" + std::to_string(counter_++); }

namespace {

bool is_leaf(const Expr& e) { return e.is_constant() || e.is_symbol() || e.is_access(); }
bool is_temp_symbol(const Expr& e) { return e.is_symbol() && e.node().role == SymbolRole::Temp; }
bool is_index_symbol(const Expr& e) { return e.is_symbol() && e.node().role == SymbolRole::Index; }

bool has_time_dim(const IterationSpace& s) {
  return std::any_of(s.entries.begin(), s.entries.end(), [](const IterEntry& e) { return e.dim()->is_time(); });
}

bool has_time_index(const Expr& e) {
  bool found = false;
  visit(e, [&](const Expr& n) {
    if (found) return false;
    if (is_index_symbol(n) && n.dim() && n.dim()->root().is_time()) found = true;
    return true;
  });
  return found;
}

// Structural replacement that never looks inside access indices.
Expr replace_outside_indices(const Expr& e, const Substitutions& rules) {
  auto it = rules.find(e);
  if (it != rules.end()) return it->second;
  if (is_leaf(e)) return e;
  std::vector<Expr> ops;
  bool changed = false;
  for (const auto& o : e.operands()) {
    ops.push_back(replace_outside_indices(o, rules));
    changed = changed || !(ops.back() == o);
  }
  return changed ? rebuild(e, std::move(ops)) : e;
}

LoweredEq make_eq_in(const Expr& lhs, const Expr& rhs, const IterationSpace& ispace, const std::vector<Guard>& guards,
                     Region region) {
  LoweredEq e;
  e.lhs = lhs;
  e.rhs = rhs;
  e.region = region;
  e.guards = guards;
  e.aligned = true;
  e = analyze(e);
  e.ispace = ispace;
  return e;
}

LoweredEq reanalyze(const LoweredEq& eq) {
  LoweredEq r = analyze(eq);
  r.ispace = eq.ispace;
  return r;
}

// ---- CSE -----------------------------------------------------------------------

struct Occurrence {
  int count = 0;
  int64_t cost = 0;  // summed op count in context
};

void count_subtrees(const Expr& e, bool in_mul, ExprMap<Occurrence>& occ) {
  if (is_leaf(e)) return;
  auto& o = occ[e];
  ++o.count;
  int64_t own = op_count(e);
  // A reciprocal factor of a product costs one op less than on its own.
  o.cost += (in_mul && e.is_pow() && e.exponent() < 0) ? own - 1 : own;
  for (const auto& c : e.operands()) count_subtrees(c, e.is_mul(), occ);
}

bool is_negation(const Expr& e) {
  if (!e.is_mul()) return false;
  auto [c, rest] = split_coefficient(e);
  return c.is_minus_one() && !rest.is_mul();
}

bool dimension_free(const Expr& e, const std::set<std::string>& hoisted) {
  bool ok = true;
  visit(e, [&](const Expr& n) {
    if (!ok) return false;
    if (n.is_access() || is_index_symbol(n)) ok = false;
    if (is_temp_symbol(n) && !hoisted.count(n.name())) ok = false;
    return ok;
  });
  return ok;
}

}  // namespace

Cluster cse(const Cluster& c, TempNamer& names, std::vector<LoweredEq>* hoisted) {
  struct Def {
    Expr sym;
    Expr rhs;
  };
  std::vector<Def> defs;
  std::vector<Expr> rhs;
  for (const auto& e : c.eqs) rhs.push_back(e.rhs);

  while (true) {
    ExprMap<Occurrence> occ;
    for (const auto& d : defs) count_subtrees(d.rhs, false, occ);
    for (const auto& r : rhs) count_subtrees(r, false, occ);
    int64_t best = 0;
    std::vector<Expr> picks;
    for (const auto& [e, o] : occ) {
      if (o.count < 2 || is_negation(e)) continue;
      int64_t own = op_count(e);
      if (o.cost - own <= 0) continue;
      if (own > best) {
        best = own;
        picks = {e};
      } else if (own == best) {
        picks.push_back(e);
      }
    }
    if (picks.empty()) break;
    std::sort(picks.begin(), picks.end(), ExprLess());
    std::vector<Expr> chosen;
    for (const auto& p : picks) {
      bool nested = std::any_of(picks.begin(), picks.end(), [&](const Expr& q) { return !(q == p) && contains(q, p); });
      if (!nested) chosen.push_back(p);
    }
    Substitutions rules;
    std::vector<Def> fresh;
    for (const auto& p : chosen) {
      Expr s = symbol(names.next(), SymbolRole::Temp);
      rules[p] = s;
      fresh.push_back({s, p});
    }
    for (auto& d : defs) d.rhs = replace_outside_indices(d.rhs, rules);
    for (auto& r : rhs) r = replace_outside_indices(r, rules);
    defs.insert(defs.end(), fresh.begin(), fresh.end());
  }

  // Definitions in dependence order.
  std::vector<Def> ordered;
  std::set<std::string> placed;
  while (ordered.size() < defs.size()) {
    for (const auto& d : defs) {
      if (placed.count(d.sym.name())) continue;
      bool ready = true;
      visit(d.rhs, [&](const Expr& n) {
        if (is_temp_symbol(n) && !placed.count(n.name()) &&
            std::any_of(defs.begin(), defs.end(), [&](const Def& o) { return o.sym.name() == n.name(); }))
          ready = false;
        return ready;
      });
      if (!ready) continue;
      placed.insert(d.sym.name());
      ordered.push_back(d);
    }
  }

  Cluster out;
  out.ispace = c.ispace;
  out.atomics = c.atomics;
  out.guards = c.guards;
  Region region = c.eqs.empty() ? Region::Domain : c.eqs.front().region;
  std::set<std::string> lifted;
  for (const auto& d : ordered) {
    if (hoisted && dimension_free(d.rhs, lifted)) {
      lifted.insert(d.sym.name());
      hoisted->push_back(make_eq_in(d.sym, d.rhs, {}, {}, Region::Domain));
      continue;
    }
    out.eqs.push_back(make_eq_in(d.sym, d.rhs, c.ispace, c.guards, region));
  }
  for (size_t i = 0; i < c.eqs.size(); ++i) {
    LoweredEq e = c.eqs[i];
    if (!(e.rhs == rhs[i])) {
      e.rhs = rhs[i];
      e = reanalyze(e);
    }
    out.eqs.push_back(e);
  }
  return out;
}

std::vector<Cluster> cse(const std::vector<Cluster>& clusters) {
  TempNamer names(clusters);
  std::vector<LoweredEq> hoisted;
  std::vector<Cluster> out;
  for (const auto& c : clusters) out.push_back(cse(c, names, &hoisted));
  if (hoisted.empty()) return out;
  // Clusters found the same dimension-free values independently.
  Substitutions same;
  std::vector<LoweredEq> unique;
  for (auto e : hoisted) {
    e.rhs = replace_outside_indices(e.rhs, same);
    auto prev = std::find_if(unique.begin(), unique.end(), [&](const LoweredEq& u) { return u.rhs == e.rhs; });
    if (prev != unique.end())
      same[e.lhs] = prev->lhs;
    else
      unique.push_back(reanalyze(e));
  }
  hoisted = unique;
  if (!same.empty())
    for (auto& c : out)
      for (auto& e : c.eqs) {
        Expr r = replace_outside_indices(e.rhs, same);
        if (r == e.rhs) continue;
        e.rhs = r;
        e = reanalyze(e);
      }
  if (!out.empty() && out.front().ispace.empty() && out.front().guards.empty()) {
    auto& eqs = out.front().eqs;
    eqs.insert(eqs.begin(), hoisted.begin(), hoisted.end());
  } else {
    Cluster pro;
    pro.eqs = hoisted;
    out.insert(out.begin(), pro);
  }
  return out;
}

// ---- factorization ---------------------------------------------------------------

namespace {

Expr factorize_sum(const Expr& s) {
  const auto& terms = s.operands();
  std::vector<std::pair<Number, std::vector<size_t>>> groups;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].is_constant()) continue;
    Number a = split_coefficient(terms[i]).first.abs();
    auto g = std::find_if(groups.begin(), groups.end(), [&](const auto& p) { return p.first == a; });
    if (g == groups.end())
      groups.push_back({a, {i}});
    else
      g->second.push_back(i);
  }
  std::vector<Expr> out;
  std::vector<bool> used(terms.size(), false);
  for (const auto& [a, idx] : groups) {
    if (idx.size() < 2) continue;
    std::vector<std::vector<Expr>> facs;
    std::vector<bool> neg;
    for (size_t i : idx) {
      auto [c, rest] = split_coefficient(terms[i]);
      facs.push_back(factors_of(rest));
      neg.push_back(c.is_negative());
    }
    std::vector<Expr> common = facs.front();
    for (size_t k = 1; k < facs.size(); ++k) {
      std::vector<Expr> pool = facs[k], keep;
      for (const auto& f : common) {
        auto it = std::find(pool.begin(), pool.end(), f);
        if (it == pool.end()) continue;
        keep.push_back(f);
        pool.erase(it);
      }
      common = keep;
    }
    if (a.is_one() && common.empty()) continue;
    std::vector<Expr> inner;
    for (size_t k = 0; k < facs.size(); ++k) {
      std::vector<Expr> rem = facs[k];
      for (const auto& f : common) rem.erase(std::find(rem.begin(), rem.end(), f));
      Expr t = rem.empty() ? integer(1) : mul(rem);
      inner.push_back(neg[k] ? -t : t);
    }
    std::vector<Expr> prod = {constant(a)};
    prod.insert(prod.end(), common.begin(), common.end());
    prod.push_back(add(inner));
    out.push_back(mul(prod));
    for (size_t i : idx) used[i] = true;
  }
  if (out.empty()) return s;
  for (size_t i = 0; i < terms.size(); ++i)
    if (!used[i]) out.push_back(terms[i]);
  Expr r = add(out);
  return op_count(r) <= op_count(s) ? r : s;
}

}  // namespace

Expr factorize(const Expr& e) {
  return transform(e, [](const Expr& n) -> Expr { return n.is_add() ? factorize_sum(n) : Expr(); }, false);
}

std::vector<Cluster> factorize(const std::vector<Cluster>& clusters) {
  std::vector<Cluster> out = clusters;
  for (auto& c : out)
    for (auto& e : c.eqs) e.rhs = factorize(e.rhs);
  return out;
}

// ---- aliases -----------------------------------------------------------------------

namespace {

struct IndexVar {
  std::string name;
  DimPtr dim;
};

std::optional<IndexVar> index_var(const Expr& idx) {
  std::optional<IndexVar> out;
  visit(idx, [&](const Expr& n) {
    if (is_index_symbol(n) && !out) out = IndexVar{n.name(), n.dim()};
    return !out;
  });
  return out;
}

bool spatial(const std::optional<IndexVar>& v) { return v && v->dim && v->dim->is_space(); }

// Every access is affine with unit stride along space dimensions.
bool translatable(const Expr& e) {
  bool ok = true;
  visit(e, [&](const Expr& n) {
    if (!ok) return false;
    if (is_temp_symbol(n)) ok = false;
    if (!n.is_access()) return true;
    for (const auto& idx : n.operands()) {
      auto a = affine_index(idx);
      if (!a.affine) {
        ok = false;
      } else if (!a.var.empty() && spatial(index_var(idx)) && !a.coeff.is_one()) {
        ok = false;
      }
    }
    return false;
  });
  return ok;
}

std::map<std::string, int64_t> reference(const Expr& e) {
  std::map<std::string, int64_t> ref;
  for (const auto& a : collect_accesses(e, false))
    for (const auto& idx : a.operands()) {
      auto v = index_var(idx);
      if (!spatial(v)) continue;
      auto ai = affine_index(idx);
      auto it = ref.find(v->name);
      if (it == ref.end())
        ref[v->name] = ai.offset;
      else
        it->second = std::min(it->second, ai.offset);
    }
  return ref;
}

std::vector<IndexVar> spatial_vars(const Expr& e) {
  std::vector<IndexVar> out;
  for (const auto& a : collect_accesses(e, false))
    for (const auto& idx : a.operands()) {
      auto v = index_var(idx);
      if (!spatial(v)) continue;
      if (std::none_of(out.begin(), out.end(), [&](const IndexVar& o) { return o.name == v->name; }))
        out.push_back(*v);
    }
  return out;
}

std::map<std::string, int64_t> negate(std::map<std::string, int64_t> m) {
  for (auto& [k, v] : m) v = -v;
  return m;
}

Expr normalized(const Expr& e) { return translate(e, negate(reference(e))); }

// Offsets along space dimensions reset to zero.
Expr erase_offsets(const Expr& e) {
  return transform(
      e,
      [](const Expr& n) -> Expr {
        if (!n.is_access()) return {};
        std::vector<Expr> idx = n.operands();
        bool changed = false;
        for (auto& i : idx) {
          auto v = index_var(i);
          if (!spatial(v)) continue;
          Expr plain = index_of(v->dim);
          if (!(i == plain)) {
            i = plain;
            changed = true;
          }
        }
        return changed ? access(n.function(), idx, n.array_form()) : Expr();
      },
      false);
}

struct Prepared {
  Expr erased;
  Displacements disp;
  std::map<std::string, int64_t> ref;
};

Prepared prepare(const Expr& e) {
  Expr x = expand(e);
  Prepared p;
  p.erased = erase_offsets(x);
  p.disp = calculate_displacements(x);
  p.ref = reference(x);
  return p;
}

bool alias_prepared(const Prepared& a, const Prepared& b) {
  return a.erased == b.erased && is_translated(a.disp, b.disp);
}

}  // namespace

Expr translate(const Expr& e, const std::map<std::string, int64_t>& delta) {
  if (delta.empty()) return e;
  return transform(
      e,
      [&](const Expr& n) -> Expr {
        if (!n.is_access()) return {};
        std::vector<Expr> idx = n.operands();
        bool changed = false;
        for (auto& i : idx) {
          auto v = index_var(i);
          if (!v) continue;
          auto d = delta.find(v->name);
          if (d == delta.end() || d->second == 0) continue;
          Substitutions s;
          visit(i, [&](const Expr& m) {
            if (is_index_symbol(m) && m.name() == v->name) s[m] = m + integer(d->second);
            return true;
          });
          i = substitute(i, s);
          changed = true;
        }
        return changed ? access(n.function(), idx, n.array_form()) : Expr();
      },
      false);
}

Displacements calculate_displacements(const Expr& e) {
  Expr x = expand(e);
  auto ref = reference(x);
  Displacements out;
  for (const auto& a : collect_accesses(normalized(x), false)) {
    Displacement d;
    d.label = a.name();
    for (const auto& idx : a.operands()) {
      auto v = index_var(idx);
      auto ai = affine_index(idx);
      d.vars.push_back(v ? v->name : "");
      bool sp = spatial(v);
      d.spatial.push_back(sp);
      d.offsets.push_back(ai.offset + (sp ? ref[v->name] : 0));
    }
    out.push_back(std::move(d));
  }
  return out;
}

bool compare_ops(const Expr& a, const Expr& b) { return erase_offsets(expand(a)) == erase_offsets(expand(b)); }

bool is_translated(const Displacements& a, const Displacements& b) {
  if (a.size() != b.size()) return false;
  std::map<std::string, int64_t> delta;
  for (size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.label != y.label || x.vars != y.vars || x.offsets.size() != y.offsets.size()) return false;
    for (size_t k = 0; k < x.offsets.size(); ++k) {
      int64_t d = y.offsets[k] - x.offsets[k];
      if (!x.spatial[k]) {
        if (d != 0) return false;
        continue;
      }
      auto it = delta.find(x.vars[k]);
      if (it == delta.end())
        delta[x.vars[k]] = d;
      else if (it->second != d)
        return false;
    }
  }
  return true;
}

bool is_alias(const Expr& a, const Expr& b) {
  return compare_ops(a, b) && is_translated(calculate_displacements(a), calculate_displacements(b));
}

std::string to_string(AliasVerdict v) {
  switch (v) {
    case AliasVerdict::Alias: return "alias";
    case AliasVerdict::DifferentOperands: return "different operand count";
    case AliasVerdict::DifferentLabel: return "different label";
    case AliasVerdict::DifferentDimensions: return "different dimensions";
    case AliasVerdict::DifferentOperators: return "different operators";
    case AliasVerdict::NoTranslation: return "no translation";
  }
  return "";
}

AliasVerdict classify_alias(const Expr& a, const Expr& b) {
  if (is_alias(a, b)) return AliasVerdict::Alias;
  auto da = calculate_displacements(a), db = calculate_displacements(b);
  if (da.size() != db.size()) return AliasVerdict::DifferentOperands;
  for (size_t i = 0; i < da.size(); ++i)
    if (da[i].label != db[i].label) return AliasVerdict::DifferentLabel;
  for (size_t i = 0; i < da.size(); ++i)
    if (da[i].vars != db[i].vars) return AliasVerdict::DifferentDimensions;
  if (!compare_ops(a, b)) return AliasVerdict::DifferentOperators;
  return AliasVerdict::NoTranslation;
}

std::vector<AliasGroup> detect_aliases(const std::vector<Expr>& candidates) {
  std::vector<Expr> unique;
  for (const auto& c : candidates)
    if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
  std::vector<Prepared> prep;
  for (const auto& c : unique) prep.push_back(prepare(c));

  std::vector<size_t> unseen(unique.size());
  for (size_t i = 0; i < unseen.size(); ++i) unseen[i] = i;
  std::vector<AliasGroup> groups;
  while (!unseen.empty()) {
    size_t top = unseen.front();
    unseen.erase(unseen.begin());
    std::vector<size_t> members = {top};
    std::vector<size_t> rest;
    for (size_t i : unseen) (alias_prepared(prep[top], prep[i]) ? members : rest).push_back(i);
    unseen = rest;
    AliasGroup g;
    for (const auto& v : spatial_vars(unique[top])) g.dims.push_back(v.name);
    for (size_t i : members) {
      g.members.push_back(unique[i]);
      std::map<std::string, int64_t> t;
      for (const auto& d : g.dims) t[d] = prep[i].ref.count(d) ? prep[i].ref.at(d) : 0;
      g.translations.push_back(t);
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

void select_pivots(std::vector<AliasGroup>& groups) {
  struct Anchor {
    std::vector<std::string> dims;
    std::map<std::string, int64_t> width;
    std::map<std::string, int64_t> lower;
  };
  std::vector<Anchor> anchors;
  for (auto& g : groups) {
    std::map<std::string, int64_t> lo, hi, width;
    for (const auto& d : g.dims) {
      lo[d] = hi[d] = g.translations.front().at(d);
      for (const auto& t : g.translations) {
        lo[d] = std::min(lo[d], t.at(d));
        hi[d] = std::max(hi[d], t.at(d));
      }
      width[d] = hi[d] - lo[d];
    }
    auto a = std::find_if(anchors.begin(), anchors.end(),
                          [&](const Anchor& x) { return x.dims == g.dims && x.width == width; });
    if (a == anchors.end()) {
      anchors.push_back({g.dims, width, lo});
      a = anchors.end() - 1;
    }
    g.origin.clear();
    g.extent.clear();
    for (const auto& d : g.dims) {
      g.origin[d] = lo[d] - a->lower.at(d);
      g.extent[d] = {lo[d] - g.origin[d], hi[d] - g.origin[d]};
    }
    std::map<std::string, int64_t> shift;
    for (const auto& d : g.dims) shift[d] = g.origin[d] - g.translations.front().at(d);
    g.pivot = translate(g.members.front(), shift);
  }
}

// ---- extraction --------------------------------------------------------------------

namespace {

struct Candidate {
  Expr expr;
  /// For a grouped subset of a sum or product: the enclosing node and the
  /// operands being replaced.
  Expr host;
  std::vector<Expr> kids;
};

struct Rewriter {
  ExprMap<Expr> direct;
  struct Host {
    std::vector<Expr> kids;
    Expr replacement;
  };
  ExprMap<Host> hosts;

  Expr operator()(const Expr& e) const {
    auto d = direct.find(e);
    if (d != direct.end()) return d->second;
    if (is_leaf(e)) return e;
    std::vector<Expr> ops = e.operands();
    auto h = hosts.find(e);
    if (h != hosts.end())
      for (const auto& k : h->second.kids) {
        auto it = std::find(ops.begin(), ops.end(), k);
        if (it != ops.end()) ops.erase(it);
      }
    for (auto& o : ops) o = (*this)(o);
    if (h != hosts.end()) ops.push_back(h->second.replacement);
    return rebuild(e, std::move(ops));
  }
};

struct ExtractContext {
  ExtractClass cls;
  int64_t threshold;
  std::set<std::string> written;
  const Cluster* cluster = nullptr;
  std::vector<std::string> outer;  // non-space consumer dimensions
};

bool invariant(const Expr& e, const ExtractContext& cx) {
  if (e.is_constant()) return true;
  if (is_temp_symbol(e)) return false;
  if (is_index_symbol(e)) return !(e.dim() && e.dim()->root().is_time());
  if (has_time_index(e)) return false;
  bool ok = translatable(e);
  visit(e, [&](const Expr& n) {
    if (!ok) return false;
    if (n.is_access() && cx.written.count(n.name())) ok = false;
    // Only grid-indexed values get a hoisted producer loop.
    if (n.is_access())
      for (const auto& idx : n.operands())
        if (!affine_index(idx).var.empty() && !spatial(index_var(idx))) ok = false;
    return ok;
  });
  return ok;
}

void collect_invariant(const Expr& n, const ExtractContext& cx, std::vector<Candidate>& out) {
  if (is_leaf(n)) return;
  if (invariant(n, cx)) {
    if (op_count(n) > cx.threshold) out.push_back({n, {}, {}});
    return;
  }
  if (n.is_add() || n.is_mul()) {
    std::vector<Expr> kids;
    for (const auto& k : n.operands())
      if (invariant(k, cx)) kids.push_back(k);
    if (kids.size() >= 2 && kids.size() < n.size()) {
      Expr g = rebuild(n, kids);
      if (op_count(g) > cx.threshold) {
        out.push_back({g, n, kids});
        for (const auto& k : n.operands())
          if (std::find(kids.begin(), kids.end(), k) == kids.end()) collect_invariant(k, cx, out);
        return;
      }
    }
  }
  for (const auto& k : n.operands()) collect_invariant(k, cx, out);
}

bool expandable(const Expr& e) {
  for (const auto& t : terms_of(expand(e)))
    for (const auto& f : factors_of(t)) {
      if (f.is_constant() || f.is_symbol() || f.is_access()) continue;
      if (f.is_pow() && f.operand(0).is_symbol()) continue;
      return false;
    }
  return true;
}

// Hoisting the candidate in front of the cluster is safe when no write of the
// cluster touches what it reads within one iteration of the outer loops.
bool hazard_free(const Expr& e, const ExtractContext& cx) {
  for (const auto& r : collect_accesses(e, false))
    for (const auto& eq : cx.cluster->eqs) {
      if (!eq.lhs.is_access() || eq.lhs.name() != r.name()) continue;
      auto v = distance_vector(eq.lhs, r, cx.outer);
      if (!v) continue;
      bool apart = std::any_of(v->begin(), v->end(), [](const Distance& d) { return d && *d != 0; });
      if (!apart) return false;
    }
  return true;
}

bool varying_candidate(const Expr& n, const ExtractContext& cx) {
  if (is_leaf(n) || op_count(n) <= cx.threshold) return false;
  if (!has_time_index(n) || !translatable(n)) return false;
  if (spatial_vars(n).empty()) return false;
  return hazard_free(n, cx) && expandable(n);
}

void collect_varying(const Expr& n, const ExtractContext& cx, std::vector<Expr>& out) {
  if (is_leaf(n)) return;
  if (varying_candidate(n, cx)) {
    out.push_back(n);
    return;
  }
  for (const auto& k : n.operands()) collect_varying(k, cx, out);
}

size_t distinct_translations(const AliasGroup& g) {
  std::set<std::map<std::string, int64_t>> s(g.translations.begin(), g.translations.end());
  return s.size();
}

// Singletons give no reuse; look for smaller aliasing pieces inside them.
std::vector<AliasGroup> varying_groups(const Cluster& c, const ExtractContext& cx) {
  std::vector<Expr> frontier;
  for (const auto& e : c.eqs) collect_varying(e.rhs, cx, frontier);
  while (true) {
    auto groups = detect_aliases(frontier);
    std::vector<Expr> next;
    bool changed = false;
    for (const auto& g : groups) {
      if (distinct_translations(g) >= 2) {
        next.insert(next.end(), g.members.begin(), g.members.end());
        continue;
      }
      for (const auto& m : g.members) {
        std::vector<Expr> kids;
        for (const auto& k : m.operands()) collect_varying(k, cx, kids);
        if (!kids.empty()) changed = true;
        next.insert(next.end(), kids.begin(), kids.end());
      }
    }
    frontier = next;
    if (!changed) break;
  }
  std::vector<AliasGroup> out;
  for (auto& g : detect_aliases(frontier))
    if (distinct_translations(g) >= 2) out.push_back(std::move(g));
  return out;
}

DimPtr find_dim(const Expr& e, const std::string& name) {
  DimPtr out;
  visit(e, [&](const Expr& n) {
    if (is_index_symbol(n) && n.name() == name && n.dim()) out = n.dim();
    return !out;
  });
  if (!out) throw std::logic_error("no dimension named " + name);
  return out;
}

GridPtr grid_in(const Cluster& c) {
  for (const auto& e : c.eqs) {
    if (e.lhs.is_access() && e.lhs.function()->grid) return e.lhs.function()->grid;
    for (const auto& a : collect_accesses(e.rhs))
      if (a.function()->grid) return a.function()->grid;
  }
  return nullptr;
}

}  // namespace

std::vector<Cluster> extract(const std::vector<Cluster>& clusters, ExtractClass cls, int64_t threshold,
                             TempNamer& names) {
  ExtractContext cx;
  cx.cls = cls;
  cx.threshold = threshold;
  for (const auto& c : clusters)
    for (const auto& e : c.eqs) cx.written.insert(e.lhs.name());

  std::vector<Cluster> prologue, out;
  for (const auto& c : clusters) {
    if (!has_time_dim(c.ispace)) {
      out.push_back(c);
      continue;
    }
    cx.cluster = &c;
    cx.outer.clear();
    for (const auto& e : c.ispace.entries)
      if (!e.dim()->is_space()) cx.outer.push_back(e.dim()->name);

    std::vector<AliasGroup> groups;
    ExprMap<std::vector<Candidate>> sites;
    if (cls == ExtractClass::TimeInvariant) {
      std::vector<Candidate> cands;
      for (const auto& e : c.eqs) collect_invariant(e.rhs, cx, cands);
      std::vector<Expr> exprs;
      for (const auto& k : cands) {
        exprs.push_back(k.expr);
        sites[k.expr].push_back(k);
      }
      groups = detect_aliases(exprs);
    } else {
      groups = varying_groups(c, cx);
      for (const auto& g : groups)
        for (const auto& m : g.members) sites[m].push_back({m, {}, {}});
    }
    if (groups.empty()) {
      out.push_back(c);
      continue;
    }
    select_pivots(groups);

    GridPtr grid = grid_in(c);
    Region region = c.eqs.front().region;
    Rewriter rw;
    std::vector<Cluster> producers;
    for (const auto& g : groups) {
      std::string name = names.next();
      std::vector<DimPtr> dims;
      std::vector<int64_t> shape;
      for (const auto& d : g.dims) {
        dims.push_back(find_dim(g.members.front(), d));
        auto pos = grid ? grid->index_of(d) : std::nullopt;
        if (!pos) throw std::logic_error("cannot size temporary along " + d);
        shape.push_back(grid->shape[*pos] + g.extent.at(d).second - g.extent.at(d).first);
      }
      Expr lhs;
      std::vector<Expr> reads;
      if (dims.empty()) {
        lhs = symbol(name, SymbolRole::Temp);
        reads.assign(g.members.size(), lhs);
      } else {
        auto decl = std::make_shared<FunctionDecl>(*make_temp_array(name, dims, shape));
        decl->grid = grid;
        FunctionPtr fn = decl;
        std::vector<Expr> widx;
        for (size_t k = 0; k < dims.size(); ++k) widx.push_back(index_of(dims[k]) - integer(g.extent.at(g.dims[k]).first));
        lhs = access(fn, widx, true);
        for (const auto& t : g.translations) {
          std::vector<Expr> ridx;
          for (size_t k = 0; k < dims.size(); ++k) {
            const auto& d = g.dims[k];
            ridx.push_back(index_of(dims[k]) + integer(t.at(d) - g.origin.at(d) - g.extent.at(d).first));
          }
          reads.push_back(access(fn, ridx, true));
        }
      }
      for (size_t i = 0; i < g.members.size(); ++i)
        for (const auto& site : sites[g.members[i]]) {
          if (site.host.defined())
            rw.hosts[site.host] = {site.kids, reads[i]};
          else
            rw.direct[site.expr] = reads[i];
        }

      IterationSpace ps;
      for (const auto& e : c.ispace.entries) {
        const auto& dn = e.dim()->name;
        auto ext = g.extent.find(dn);
        if (ext != g.extent.end()) {
          IterEntry pe = e;
          pe.interval.lower = ext->second.first;
          pe.interval.upper = ext->second.second;
          pe.direction = Direction::Any;
          ps.entries.push_back(pe);
        } else if (cls == ExtractClass::TimeVarying && !e.dim()->is_space()) {
          ps.entries.push_back(e);
        }
      }
      std::vector<Guard> guards = cls == ExtractClass::TimeVarying ? c.guards : std::vector<Guard>{};
      LoweredEq pe = make_eq_in(lhs, g.pivot, ps, guards, region);
      auto slot = std::find_if(producers.begin(), producers.end(), [&](const Cluster& p) { return p.ispace == ps; });
      if (slot == producers.end()) {
        Cluster p;
        p.ispace = ps;
        p.guards = guards;
        producers.push_back(p);
        slot = producers.end() - 1;
      }
      slot->eqs.push_back(pe);
    }

    Cluster consumer = c;
    for (auto& e : consumer.eqs) {
      Expr r = rw(e.rhs);
      if (!(r == e.rhs)) {
        e.rhs = r;
        e = reanalyze(e);
      }
    }
    if (cls == ExtractClass::TimeInvariant) {
      prologue.insert(prologue.end(), producers.begin(), producers.end());
      out.push_back(consumer);
      continue;
    }
    for (const auto& p : producers) {
      if (p.ispace == consumer.ispace && same_guards(p.guards, consumer.guards))
        consumer.eqs.insert(consumer.eqs.begin(), p.eqs.begin(), p.eqs.end());
      else
        out.push_back(p);
    }
    out.push_back(consumer);
  }
  if (prologue.empty()) return out;

  // Merge producers sharing an iteration space, dimension-free ones first.
  std::vector<Cluster> merged;
  for (const auto& p : prologue) {
    auto m = std::find_if(merged.begin(), merged.end(), [&](const Cluster& q) { return q.ispace == p.ispace; });
    if (m == merged.end())
      merged.push_back(p);
    else
      m->eqs.insert(m->eqs.end(), p.eqs.begin(), p.eqs.end());
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Cluster& a, const Cluster& b) { return a.ispace.empty() && !b.ispace.empty(); });
  size_t at = 0;
  while (at < out.size() && out[at].ispace.empty()) ++at;
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), merged.begin(), merged.end());
  return out;
}

std::vector<Cluster> contract_arrays(const std::vector<Cluster>& clusters) {
  struct Use {
    std::set<size_t> clusters;
    std::vector<Expr> writes;
    std::vector<Expr> reads;
  };
  std::map<std::string, Use> uses;
  for (size_t ci = 0; ci < clusters.size(); ++ci)
    for (const auto& e : clusters[ci].eqs) {
      if (e.lhs.is_access() && e.lhs.function()->is_temp()) {
        auto& u = uses[e.lhs.name()];
        u.clusters.insert(ci);
        u.writes.push_back(e.lhs);
      }
      for (const auto& a : collect_accesses(e.rhs))
        if (a.function()->is_temp()) {
          auto& u = uses[a.name()];
          u.clusters.insert(ci);
          u.reads.push_back(a);
        }
    }
  Substitutions rules;
  for (const auto& [name, u] : uses) {
    if (u.clusters.size() != 1 || u.writes.size() != 1) continue;
    const Expr& w = u.writes.front();
    if (!std::all_of(u.reads.begin(), u.reads.end(), [&](const Expr& r) { return r == w; })) continue;
    rules[w] = symbol(name, SymbolRole::Temp);
  }
  if (rules.empty()) return clusters;
  std::vector<Cluster> out = clusters;
  for (auto& c : out)
    for (auto& e : c.eqs) {
      auto l = rules.find(e.lhs);
      Expr r = replace_outside_indices(e.rhs, rules);
      if (l == rules.end() && r == e.rhs) continue;
      IterationSpace keep = e.ispace;
      if (l != rules.end()) e.lhs = l->second;
      e.rhs = r;
      e = analyze(e);
      e.ispace = keep;
    }
  return out;
}

std::vector<Cluster> renumber(std::vector<Cluster> clusters) {
  int id = 0;
  for (auto& c : clusters)
    for (auto& e : c.eqs) e.id = id++;
  return clusters;
}

std::vector<Cluster> run_dse(const std::vector<Cluster>& clusters, const DseOptions& opts) {
  std::vector<Cluster> cs = clusters;
  if (opts.mode != DseMode::Basic) {
    cs = factorize(cs);
    TempNamer names(cs);
    cs = extract(cs, ExtractClass::TimeInvariant, opts.thr_invariant, names);
    if (opts.mode == DseMode::Aggressive) cs = extract(cs, ExtractClass::TimeVarying, opts.thr_varying, names);
    cs = contract_arrays(cs);
  }
  cs = cse(cs);
  return renumber(cs);
}

// ---- metrics -----------------------------------------------------------------------

int64_t cluster_ops(const Cluster& c) {
  int64_t n = 0;
  for (const auto& e : c.eqs) n += op_count(e.rhs);
  return n;
}

int64_t time_loop_ops(const std::vector<Cluster>& clusters) {
  int64_t n = 0;
  for (const auto& c : clusters)
    if (has_time_dim(c.ispace)) n += cluster_ops(c);
  return n;
}

int64_t temp_footprint(const std::vector<Cluster>& clusters) {
  std::set<std::string> seen;
  int64_t n = 0;
  for (const auto& c : clusters)
    for (const auto& e : c.eqs) {
      if (!e.lhs.is_access() || !e.lhs.function()->is_temp() || !seen.insert(e.lhs.name()).second) continue;
      int64_t sz = 1;
      for (auto s : e.lhs.function()->shape) sz *= s;
      n += sz;
    }
  return n;
}

}  // namespace stencil
