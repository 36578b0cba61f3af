#include "stencil/iet.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stencil {

std::string to_string(LoopProperty p) {
  switch (p) {
    case LoopProperty::Sequential: return "sequential";
    case LoopProperty::Parallel: return "parallel";
    case LoopProperty::Vectorizable: return "vectorizable";
    case LoopProperty::Atomic: return "atomic";
    case LoopProperty::Blocked: return "blocked";
  }
  return "?";
}

IetPtr make_block(std::vector<IetPtr> children) {
  auto n = std::make_shared<IetNode>();
  n->kind = IetKind::Block;
  n->children = std::move(children);
  return n;
}

IetPtr make_iteration(const IterEntry& entry) {
  auto n = std::make_shared<IetNode>();
  n->kind = IetKind::Iteration;
  n->dim = entry.dim();
  n->interval = entry.interval;
  n->direction = entry.direction;
  return n;
}

IetPtr make_expression(const LoweredEq& eq, int cluster) {
  auto n = std::make_shared<IetNode>();
  n->kind = IetKind::Expression;
  n->eq = eq;
  n->cluster = cluster;
  return n;
}

IetPtr make_conditional(const std::vector<Guard>& guards) {
  auto n = std::make_shared<IetNode>();
  n->kind = IetKind::Conditional;
  n->guards = guards;
  return n;
}

IetPtr clone(const IetPtr& n) {
  auto c = std::make_shared<IetNode>(*n);
  for (auto& ch : c->children) ch = clone(ch);
  return c;
}

const std::string& loop_var(const IetNode& it) { return it.dim->name; }

const Dimension& bound_dim(const IetNode& it) {
  return it.dim->kind == DimKind::Block ? *it.dim->parent : *it.dim;
}

// ---- construction ------------------------------------------------------------------

IetPtr build_iet(const std::vector<Cluster>& clusters) {
  IetPtr root = make_block();
  std::vector<IetPtr> schedule;
  for (size_t ci = 0; ci < clusters.size(); ++ci) {
    const auto& c = clusters[ci];
    auto guarded = [&](const std::string& d) {
      return std::any_of(c.guards.begin(), c.guards.end(), [&](const Guard& g) { return g.dim->name == d; });
    };
    IetPtr parent = root;
    size_t index = 0;
    for (size_t k = 0; k < std::min(c.ispace.size(), schedule.size()); ++k) {
      const auto& i0 = c.ispace.entries[k];
      const auto& i1 = *schedule[k];
      if (i0.interval != i1.interval || i0.direction != i1.direction || c.atomics.count(i0.dim()->name)) break;
      parent = schedule[k];
      ++index;
      if (guarded(i0.dim()->name)) break;
    }

    std::vector<Guard> pending = c.guards;
    auto open_guards = [&](IetPtr& cur, const std::string& d) {
      std::vector<Guard> here;
      for (auto it = pending.begin(); it != pending.end();) {
        if (d.empty() ? !c.ispace.find(it->dim->name) : it->dim->name == d) {
          here.push_back(*it);
          it = pending.erase(it);
        } else {
          ++it;
        }
      }
      if (here.empty()) return;
      IetPtr cond = make_conditional(here);
      cur->children.push_back(cond);
      cur = cond;
    };

    IetPtr cur = parent;
    // Guards on dimensions outside the ISpace, or on the last reused loop.
    open_guards(cur, "");
    if (index > 0) open_guards(cur, c.ispace.entries[index - 1].dim()->name);
    std::vector<IetPtr> fresh;
    for (size_t k = index; k < c.ispace.size(); ++k) {
      IetPtr it = make_iteration(c.ispace.entries[k]);
      cur->children.push_back(it);
      cur = it;
      fresh.push_back(it);
      open_guards(cur, c.ispace.entries[k].dim()->name);
    }
    for (const auto& e : c.eqs) cur->children.push_back(make_expression(e, static_cast<int>(ci)));

    schedule.resize(index);
    schedule.insert(schedule.end(), fresh.begin(), fresh.end());
    if (!c.guards.empty()) {
      // Loops inside a Conditional cannot host unguarded clusters.
      size_t keep = 0;
      for (size_t k = 0; k < c.ispace.size() && k < schedule.size(); ++k)
        if (guarded(c.ispace.entries[k].dim()->name)) keep = k + 1;
      schedule.resize(keep);
    }
  }
  return root;
}

// ---- traversal ---------------------------------------------------------------------

namespace {

void collect(const IetPtr& n, IetKind kind, std::vector<IetPtr>& out) {
  if (n->kind == kind) out.push_back(n);
  for (const auto& c : n->children) collect(c, kind, out);
}

}  // namespace

std::vector<IetPtr> statements(const IetPtr& iet) {
  std::vector<IetPtr> out;
  collect(iet, IetKind::Expression, out);
  return out;
}

std::vector<IetPtr> iterations(const IetPtr& iet) {
  std::vector<IetPtr> out;
  collect(iet, IetKind::Iteration, out);
  return out;
}

std::vector<std::string> section_names(const IetPtr& iet) {
  std::vector<IetPtr> s;
  collect(iet, IetKind::Section, s);
  std::vector<std::string> out;
  for (const auto& n : s) out.push_back(n->name);
  return out;
}

// ---- analysis ----------------------------------------------------------------------

namespace {

void mark(const IetPtr& n, std::vector<std::string>& dims, const std::vector<Dependence>& deps) {
  if (n->kind == IetKind::Iteration) {
    dims.push_back(n->dim->name);
    std::set<int> under;
    for (const auto& s : statements(n)) under.insert(s->eq.id);
    bool parallel = true, only_reductions = true;
    for (const auto& d : deps) {
      if (!under.count(d.source) || !under.count(d.sink)) continue;
      auto at = [&](const std::string& dn) -> Distance {
        auto it = std::find(d.dims.begin(), d.dims.end(), dn);
        if (it == d.dims.end()) return std::nullopt;
        return d.distance[static_cast<size_t>(it - d.dims.begin())];
      };
      // Carried by an enclosing loop: first non-zero outer entry is positive.
      bool outer_positive = false, blocked = false;
      for (size_t k = 0; k + 1 < dims.size(); ++k) {
        Distance v = at(dims[k]);
        if (!v) {
          blocked = true;
          break;
        }
        if (*v == 0) continue;
        outer_positive = *v > 0;
        blocked = !outer_positive;
        break;
      }
      if (outer_positive) continue;
      bool ok = false;
      if (!blocked) {
        Distance v = at(dims.back());
        ok = v && *v == 0;
      }
      if (ok) continue;
      parallel = false;
      if (!d.is_reduction) only_reductions = false;
    }
    n->props.clear();
    if (parallel) {
      n->props.insert(LoopProperty::Parallel);
    } else if (only_reductions) {
      n->props.insert(LoopProperty::Parallel);
      n->props.insert(LoopProperty::Atomic);
    } else {
      n->props.insert(LoopProperty::Sequential);
    }
  }
  for (const auto& c : n->children) mark(c, dims, deps);
  if (n->kind == IetKind::Iteration) {
    dims.pop_back();
    bool innermost = iterations(n).size() == 1;
    if (innermost && n->dim->is_space() && n->has(LoopProperty::Parallel) && !n->has(LoopProperty::Atomic))
      n->props.insert(LoopProperty::Vectorizable);
  }
}

}  // namespace

IetPtr analyze_iet(const IetPtr& iet) {
  IetPtr out = clone(iet);
  std::vector<LoweredEq> eqs;
  for (const auto& s : statements(out)) eqs.push_back(s->eq);
  auto deps = all_dependences(eqs);
  std::vector<std::string> dims;
  mark(out, dims, deps);
  return out;
}

// ---- blocking ----------------------------------------------------------------------

namespace {

bool is_temp_lhs(const LoweredEq& e) {
  if (e.lhs.is_symbol()) return e.lhs.node().role == SymbolRole::Temp;
  return e.lhs.is_access() && e.lhs.function()->is_temp();
}

bool writes_only_temps(const IetPtr& n) {
  auto st = statements(n);
  return !st.empty() && std::all_of(st.begin(), st.end(), [](const IetPtr& s) { return is_temp_lhs(s->eq); });
}

std::set<std::string> temps_written(const IetPtr& n) {
  std::set<std::string> out;
  for (const auto& s : statements(n))
    if (s->eq.lhs.is_access() && s->eq.lhs.function()->is_temp()) out.insert(s->eq.lhs.name());
  return out;
}

bool same_loop_kind(const IetPtr& a, const IetPtr& b) {
  return a->is_loop() && b->is_loop() && a->dim->name == b->dim->name && a->interval.region == b->interval.region &&
         !a->block && !b->block;
}

struct Blocker {
  const std::map<std::string, int64_t>& shape;
  IetPtr root;

  void require_parallel(const IetPtr& it) const {
    if (!it->has(LoopProperty::Parallel) || it->has(LoopProperty::Atomic))
      throw std::invalid_argument("cannot block sequential loop over " + it->dim->name);
  }

  bool wanted(const IetPtr& n) const { return n->is_loop() && !n->block && shape.count(n->dim->name); }

  // Read anywhere outside the given siblings?
  bool read_elsewhere(const std::set<std::string>& temps, const std::vector<IetPtr>& group) const {
    std::set<const IetNode*> inside;
    for (const auto& g : group)
      for (const auto& s : statements(g)) inside.insert(s.get());
    for (const auto& s : statements(root)) {
      if (inside.count(s.get())) continue;
      for (const auto& a : collect_accesses(s->eq.rhs))
        if (temps.count(a.name())) return true;
    }
    return false;
  }

  void process(const IetPtr& container) {
    std::vector<IetPtr> out;
    auto& ch = container->children;
    size_t i = 0;
    while (i < ch.size()) {
      if (!wanted(ch[i])) {
        process(ch[i]);
        out.push_back(ch[i]);
        ++i;
        continue;
      }
      size_t k = i;
      while (k + 1 < ch.size() && writes_only_temps(ch[k]) && same_loop_kind(ch[i], ch[k + 1])) ++k;
      std::vector<IetPtr> group(ch.begin() + static_cast<std::ptrdiff_t>(i),
                                ch.begin() + static_cast<std::ptrdiff_t>(k + 1));
      std::set<std::string> produced;
      for (size_t j = 0; j + 1 < group.size(); ++j) {
        auto t = temps_written(group[j]);
        produced.insert(t.begin(), t.end());
      }
      if (group.size() > 1 && read_elsewhere(produced, group)) {
        group.resize(1);
        produced.clear();
        k = i;
      }
      out.push_back(block_group(group, produced));
      i = k + 1;
    }
    ch = out;
  }

  IetPtr block_group(const std::vector<IetPtr>& group, const std::set<std::string>& produced) {
    // Levels blocked together: perfectly nested wanted loops common to all nests.
    std::vector<std::vector<IetPtr>> levels = {group};
    while (true) {
      std::vector<IetPtr> next;
      for (const auto& n : levels.back()) {
        if (n->children.size() != 1 || !wanted(n->children[0])) break;
        next.push_back(n->children[0]);
      }
      if (next.size() != group.size()) break;
      bool same = std::all_of(next.begin(), next.end(), [&](const IetPtr& n) { return same_loop_kind(next[0], n); });
      bool fresh = std::none_of(levels.begin(), levels.end(),
                                [&](const auto& l) { return l[0]->dim->name == next[0]->dim->name; });
      if (!same || !fresh) break;
      levels.push_back(next);
    }
    for (const auto& l : levels)
      for (const auto& n : l) require_parallel(n);

    std::vector<IetPtr> block_loops;
    for (const auto& l : levels) {
      const IetPtr& proto = l[0];
      auto b = std::make_shared<IetNode>();
      b->kind = IetKind::Iteration;
      b->dim = make_block_dim(proto->dim);
      b->interval.dim = b->dim;
      b->interval.region = proto->interval.region;
      // The last nest (the consumer) fixes the tiled range.
      b->interval.lower = l.back()->interval.lower;
      b->interval.upper = l.back()->interval.upper;
      b->step = shape.at(proto->dim->name);
      b->props = {LoopProperty::Parallel, LoopProperty::Blocked};
      block_loops.push_back(b);
    }
    for (size_t k = 0; k + 1 < block_loops.size(); ++k) block_loops[k]->children = {block_loops[k + 1]};

    // Shrink temporaries to the block: index var d -> d - db.
    std::map<std::string, FunctionPtr> resized;
    Substitutions shift;
    for (size_t li = 0; li < levels.size(); ++li) {
      const auto& d = levels[li][0]->dim;
      shift[index_of(d)] = index_of(d) - index_of(block_loops[li]->dim) + integer(block_loops[li]->interval.lower);
    }
    for (size_t j = 0; j + 1 < group.size(); ++j)
      for (const auto& s : statements(group[j])) {
        if (!s->eq.lhs.is_access()) continue;
        const auto& fn = s->eq.lhs.function();
        if (!produced.count(fn->name) || resized.count(fn->name)) continue;
        auto decl = std::make_shared<FunctionDecl>(*fn);
        for (size_t li = 0; li < levels.size(); ++li) {
          auto pos = fn->position_of(levels[li][0]->dim->name);
          if (!pos) continue;
          const auto& iv = levels[li][j]->interval;
          const auto& ref = block_loops[li]->interval;
          decl->shape[*pos] = block_loops[li]->step + (iv.upper - ref.upper) - (iv.lower - ref.lower);
        }
        resized[fn->name] = decl;
      }
    auto rewrite = [&](const Expr& e) {
      return transform(e, [&](const Expr& n) -> Expr {
        if (!n.is_access()) return {};
        auto r = resized.find(n.name());
        if (r == resized.end()) return {};
        std::vector<Expr> idx;
        for (size_t p = 0; p < n.size(); ++p) {
          bool blocked_pos = std::any_of(levels.begin(), levels.end(), [&](const auto& l) {
            return r->second->dims[p]->name == l[0]->dim->name;
          });
          idx.push_back(blocked_pos ? substitute(n.operand(p), shift) : n.operand(p));
        }
        return access(r->second, idx, true);
      });
    };

    for (size_t j = 0; j < group.size(); ++j) {
      IetPtr nest = group[j];
      for (size_t li = 0; li < levels.size(); ++li) {
        IetPtr it = levels[li][j];
        it->block = block_loops[li]->dim;
        it->step = block_loops[li]->step;
        it->clamp = block_loops[li]->interval.upper;
        it->interval.lower -= block_loops[li]->interval.lower;
        it->interval.upper -= block_loops[li]->interval.upper;
        it->props.insert(LoopProperty::Blocked);
      }
      if (!resized.empty())
        for (const auto& s : statements(nest)) {
          s->eq.lhs = rewrite(s->eq.lhs);
          s->eq.rhs = rewrite(s->eq.rhs);
        }
      block_loops.back()->children.push_back(nest);
    }
    // Inner levels of the nests may hold further blockable loops.
    for (const auto& n : levels.back())
      for (const auto& c : n->children) process_inner(c);
    return block_loops.front();
  }

  void process_inner(const IetPtr& n) {
    if (n->kind == IetKind::Expression) return;
    process(n);
  }
};

}  // namespace

IetPtr block_loops(const IetPtr& iet, const std::map<std::string, int64_t>& shape) {
  for (const auto& [d, s] : shape)
    if (s < 1) throw std::invalid_argument("block size along " + d + " must be positive");
  IetPtr out = clone(iet);
  Blocker b{shape, out};
  b.process(out);
  return out;
}

std::vector<std::string> blockable_dims(const IetPtr& iet) {
  std::vector<std::string> out;
  for (const auto& it : iterations(iet)) {
    if (!it->dim->is_space() || it->block || !it->has(LoopProperty::Parallel) || it->has(LoopProperty::Atomic))
      continue;
    if (std::find(out.begin(), out.end(), it->dim->name) == out.end()) out.push_back(it->dim->name);
  }
  // A dimension is only blockable if none of its loops is sequential.
  std::vector<std::string> ok;
  for (const auto& d : out) {
    bool seq = false;
    for (const auto& it : iterations(iet))
      if (it->dim->name == d && (!it->has(LoopProperty::Parallel) || it->has(LoopProperty::Atomic))) seq = true;
    if (!seq) ok.push_back(d);
  }
  return ok;
}

std::vector<BlockShape> default_block_candidates(const IetPtr& iet) {
  auto dims = blockable_dims(iet);
  std::vector<BlockShape> out;
  if (dims.empty()) return out;
  for (int64_t s = 4; s <= 64; s *= 2) {
    BlockShape b;
    for (const auto& d : dims) b[d] = s;
    out.push_back(b);
  }
  return out;
}

BlockShape autotune_blocks(const IetPtr& iet, const std::function<double(const IetPtr&)>& runner,
                           const std::vector<BlockShape>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("autotuning needs at least one candidate block shape");
  double best = std::numeric_limits<double>::infinity();
  BlockShape choice = candidates.front();
  for (const auto& c : candidates) {
    double t = runner(block_loops(iet, c));
    if (t < best) {
      best = t;
      choice = c;
    }
  }
  return choice;
}

// ---- declarations ------------------------------------------------------------------

namespace {

void paths(const IetPtr& n, std::vector<IetPtr>& stack, std::map<const IetNode*, std::vector<IetPtr>>& out) {
  stack.push_back(n);
  if (n->kind == IetKind::Expression) out[n.get()] = stack;
  for (const auto& c : n->children) paths(c, stack, out);
  stack.pop_back();
}

std::set<std::string> uses_of(const LoweredEq& e) {
  std::set<std::string> out;
  visit(e.rhs, [&](const Expr& n) {
    if ((n.is_symbol() && n.node().role == SymbolRole::Temp) || n.is_access()) out.insert(n.name());
    return true;
  });
  if (e.lhs.is_access())
    for (const auto& i : e.lhs.operands())
      for (const auto& a : collect_accesses(i)) out.insert(a.name());
  return out;
}

void drop_statements(const IetPtr& n, const std::set<const IetNode*>& dead) {
  auto& ch = n->children;
  ch.erase(std::remove_if(ch.begin(), ch.end(), [&](const IetPtr& c) { return dead.count(c.get()) > 0; }), ch.end());
  for (const auto& c : ch) drop_statements(c, dead);
}

}  // namespace

IetPtr place_declarations(const IetPtr& iet) {
  IetPtr out = clone(iet);
  std::function<void(const IetPtr&)> clear = [&](const IetPtr& n) {
    n->decls.clear();
    for (const auto& c : n->children) clear(c);
  };
  clear(out);

  // Unused temporaries go first (repeat: removing one may orphan another).
  while (true) {
    auto st = statements(out);
    std::set<std::string> used;
    for (const auto& s : st) {
      auto u = uses_of(s->eq);
      used.insert(u.begin(), u.end());
    }
    std::set<const IetNode*> dead;
    for (const auto& s : st)
      if (is_temp_lhs(s->eq) && !used.count(s->eq.lhs.name())) dead.insert(s.get());
    if (dead.empty()) break;
    drop_statements(out, dead);
  }

  std::map<const IetNode*, std::vector<IetPtr>> where;
  std::vector<IetPtr> stack;
  paths(out, stack, where);
  std::vector<std::string> order;
  std::map<std::string, std::vector<const IetNode*>> sites;
  std::map<std::string, FunctionPtr> arrays;
  auto st = statements(out);
  for (const auto& s : st)
    if (is_temp_lhs(s->eq)) {
      const auto& n = s->eq.lhs.name();
      if (!sites.count(n)) order.push_back(n);
      sites[n].push_back(s.get());
      if (s->eq.lhs.is_access()) arrays[n] = s->eq.lhs.function();
    }
  for (const auto& s : st)
    for (const auto& u : uses_of(s->eq))
      if (sites.count(u)) sites[u].push_back(s.get());

  for (const auto& name : order) {
    const auto& nodes = sites[name];
    std::vector<IetPtr> common = where.at(nodes.front());
    for (const auto* n : nodes) {
      const auto& p = where.at(n);
      size_t k = 0;
      while (k < common.size() && k < p.size() && common[k] == p[k]) ++k;
      common.resize(k);
    }
    // The statement itself is never a scope.
    while (!common.empty() && common.back()->kind == IetKind::Expression) common.pop_back();
    if (common.empty()) throw std::logic_error("temporary " + name + " has no dominating scope");
    bool in_parallel = std::any_of(common.begin(), common.end(), [](const IetPtr& n) {
      return n->is_loop() && n->has(LoopProperty::Parallel);
    });
    Declaration d;
    d.name = name;
    auto a = arrays.find(name);
    if (a != arrays.end()) {
      d.array = a->second;
      d.per_thread = in_parallel;
      out->decls.push_back(d);
    } else {
      d.is_private = in_parallel;
      common.back()->decls.push_back(d);
    }
  }
  return out;
}

// ---- sections ----------------------------------------------------------------------

namespace {

void sectionize(const IetPtr& n, int& counter) {
  for (auto& c : n->children) {
    if (c->is_loop() && c->dim->is_time()) {
      sectionize(c, counter);
      continue;
    }
    if (c->kind != IetKind::Iteration && c->kind != IetKind::Conditional) continue;
    auto s = std::make_shared<IetNode>();
    s->kind = IetKind::Section;
    s->name = "section" + std::to_string(counter++);
    s->children = {c};
    c = s;
  }
}

}  // namespace

IetPtr add_sections(const IetPtr& iet) {
  IetPtr out = clone(iet);
  int counter = 0;
  sectionize(out, counter);
  return out;
}

// ---- bounds ------------------------------------------------------------------------

namespace {

std::string plus(const std::string& base, int64_t k) {
  if (k == 0) return base;
  return base + (k > 0 ? " + " : " - ") + std::to_string(k > 0 ? k : -k);
}

int64_t shrink_of(const IetNode& it) {
  return (it.interval.region == Region::Interior && bound_dim(it).is_space()) ? 1 : 0;
}

}  // namespace

std::string lower_bound_text(const IetNode& it) {
  const auto& d = bound_dim(it);
  int64_t s = shrink_of(it);
  if (it.block) return plus(it.block->name, it.interval.lower);
  return plus(lower_symbol(d.name), s + it.interval.lower);
}

std::string upper_bound_text(const IetNode& it) {
  const auto& d = bound_dim(it);
  int64_t s = shrink_of(it);
  if (it.block)
    return plus("min(" + plus(it.block->name, it.step - 1) + ", " + plus(upper_symbol(d.name), it.clamp - s) + ")",
                it.interval.upper);
  return plus(upper_symbol(d.name), it.interval.upper - s);
}

LoopRange loop_range(const IetNode& it, const std::function<int64_t(const std::string&)>& value) {
  const auto& d = bound_dim(it);
  int64_t s = shrink_of(it);
  int64_t core_lo = value(lower_symbol(d.name)) + s;
  int64_t core_hi = value(upper_symbol(d.name)) - s;
  LoopRange r;
  if (it.block) {
    int64_t b = value(it.block->name);
    r.lo = b + it.interval.lower;
    r.hi = std::min(b + it.step - 1, core_hi + it.clamp) + it.interval.upper;
  } else {
    r.lo = core_lo + it.interval.lower;
    r.hi = core_hi + it.interval.upper;
    r.step = it.step;
  }
  return r;
}

// ---- dump --------------------------------------------------------------------------

namespace {

std::string header(const IetNode& n, bool with_props) {
  std::ostringstream os;
  switch (n.kind) {
    case IetKind::Iteration: {
      os << "for " << n.dim->name << " = " << lower_bound_text(n) << " to " << upper_bound_text(n);
      if (n.dim->kind == DimKind::Block) os << " step " << n.step;
      os << ":";
      if (with_props && !n.props.empty()) {
        os << "  #";
        for (auto p : {LoopProperty::Sequential, LoopProperty::Parallel, LoopProperty::Atomic,
                       LoopProperty::Vectorizable, LoopProperty::Blocked})
          if (n.has(p)) os << " " << to_string(p);
      }
      break;
    }
    case IetKind::Conditional: {
      os << "if ";
      for (size_t i = 0; i < n.guards.size(); ++i) os << (i ? " && " : "") << n.guards[i].str();
      os << ":";
      break;
    }
    case IetKind::Section: os << n.name << ":"; break;
    case IetKind::Expression:
      os << "<Eq(" << unalign_expr(n.eq.lhs).str() << ", " << unalign_expr(n.eq.rhs).str() << ")>";
      break;
    case IetKind::Block: os << "block:"; break;
  }
  return os.str();
}

void dump_children(const IetNode& n, const std::string& prefix, bool with_props, std::ostringstream& os) {
  for (size_t i = 0; i < n.children.size(); ++i) {
    const auto& c = *n.children[i];
    bool last = i + 1 == n.children.size();
    os << prefix << " |-- " << header(c, with_props) << "\n";
    dump_children(c, prefix + (last ? "     " : " |   "), with_props, os);
    if (!last && !c.children.empty()) os << prefix << " |\n";
  }
}

}  // namespace

std::string dump(const IetPtr& iet, bool with_properties) {
  std::ostringstream os;
  const IetNode& root = *iet;
  if (root.kind != IetKind::Block) {
    os << header(root, with_properties) << "\n";
    dump_children(root, "", with_properties, os);
    return os.str();
  }
  for (const auto& c : root.children) {
    os << header(*c, with_properties) << "\n";
    dump_children(*c, "", with_properties, os);
  }
  return os.str();
}

}  // namespace stencil
