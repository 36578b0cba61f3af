#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "stencil/interpreter.hpp"

namespace stencil {

namespace {

struct Env {
  Buffers& buffers;
  const Params& params;
  // Loop variables, innermost last; nests are shallow so a scan is cheapest.
  std::vector<std::pair<std::string, int64_t>> vars;
  std::map<std::string, double> temps;
  std::map<const FunctionDecl*, DataBuffer*> cache;
  std::unordered_map<const ExprNode*, double> scalars;

  int64_t var(const std::string& name) const {
    for (const auto& [n, v] : vars)
      if (n == name) return v;
    throw std::logic_error("index " + name + " has no loop");
  }
  DataBuffer& buffer(const FunctionPtr& fn) {
    auto c = cache.find(fn.get());
    if (c != cache.end()) return *c->second;
    auto it = buffers.find(fn->name);
    if (it == buffers.end()) throw std::runtime_error("no data buffer for '" + fn->name + "'");
    cache[fn.get()] = &it->second;
    return it->second;
  }
};

double eval(const Expr& e, Env& env);

size_t offset_of(const Expr& a, Env& env, DataBuffer*& buf) {
  const auto& fn = a.function();
  buf = &env.buffer(fn);
  size_t off = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    auto v = static_cast<int64_t>(std::llround(eval(a.operand(i), env)));
    if (int m = fn->modulo(i)) v = ((v % m) + m) % m;
    if (v < 0 || v >= buf->extents[i])
      throw std::out_of_range("out-of-bounds access to " + fn->name + ": index " + std::to_string(v) +
                              " outside [0, " + std::to_string(buf->extents[i] - 1) + "]");
    off += static_cast<size_t>(v * buf->strides[i]);
  }
  return off;
}

double eval(const Expr& e, Env& env) {
  switch (e.kind()) {
    case ExprKind::Constant: return e.number().value();
    case ExprKind::Symbol: {
      if (e.node().role == SymbolRole::Index) {
        return static_cast<double>(env.var(e.name()));
      }
      if (e.node().role == SymbolRole::Temp) return env.temps.at(e.name());
      auto c = env.scalars.find(e.get());
      if (c != env.scalars.end()) return c->second;
      auto p = env.params.find(e.name());
      if (p == env.params.end()) throw std::runtime_error("unbound symbol " + e.name());
      env.scalars.emplace(e.get(), p->second);
      return p->second;
    }
    case ExprKind::Access: {
      DataBuffer* b = nullptr;
      size_t off = offset_of(e, env, b);
      return b->get(off);
    }
    case ExprKind::Add: {
      double s = 0;
      for (const auto& t : e.operands()) s += eval(t, env);
      return s;
    }
    case ExprKind::Mul: {
      double p = 1;
      for (const auto& f : e.operands()) p *= eval(f, env);
      return p;
    }
    case ExprKind::Pow: {
      double b = eval(e.operand(0), env), r = 1;
      for (int i = 0; i < std::abs(e.exponent()); ++i) r *= b;
      return e.exponent() < 0 ? 1.0 / r : r;
    }
    case ExprKind::Call: {
      std::vector<double> args;
      for (const auto& a : e.operands()) args.push_back(eval(a, env));
      return apply_builtin(e.name(), args);
    }
  }
  return 0;
}

void assign(const LoweredEq& eq, Env& env) {
  for (const auto& g : eq.guards)
    if (env.var(g.dim->name) % g.factor != 0) return;
  double v = eval(eq.rhs, env);
  if (eq.lhs.is_access()) {
    DataBuffer* b = nullptr;
    size_t off = offset_of(eq.lhs, env, b);
    b->set(off, v);
  } else {
    env.temps[eq.lhs.name()] = v;
  }
}

int64_t param_int(const Params& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) throw std::runtime_error("unbound symbol " + name);
  return static_cast<int64_t>(std::llround(it->second));
}

// Nest over ispace entries [k, end), skipping `skip`.
void nest(const LoweredEq& eq, size_t k, const std::string& skip, Env& env) {
  if (k == eq.ispace.size()) {
    assign(eq, env);
    return;
  }
  const auto& e = eq.ispace.entries[k];
  const auto& name = e.dim()->name;
  if (name == skip) {
    nest(eq, k + 1, skip, env);
    return;
  }
  int64_t s = (e.interval.region == Region::Interior && e.dim()->is_space()) ? 1 : 0;
  int64_t lo = param_int(env.params, lower_symbol(name)) + s + e.interval.lower;
  int64_t hi = param_int(env.params, upper_symbol(name)) - s + e.interval.upper;
  env.vars.emplace_back(name, 0);
  size_t slot = env.vars.size() - 1;
  for (int64_t k2 = 0; k2 <= hi - lo; ++k2) {
    env.vars[slot].second = e.direction == Direction::Backward ? hi - k2 : lo + k2;
    nest(eq, k + 1, skip, env);
  }
  env.vars.pop_back();
}

const IterEntry* time_entry(const LoweredEq& eq) {
  for (const auto& e : eq.ispace.entries)
    if (e.dim()->is_time()) return &e;
  return nullptr;
}

}  // namespace

void reference_run(const std::vector<LoweredEq>& eqs, Buffers& buffers, const Params& params) {
  if (eqs.empty()) return;
  Params full = resolve_params(eqs, params);
  Env env{buffers, full, {}, {}, {}, {}};
  size_t i = 0;
  while (i < eqs.size()) {
    const IterEntry* te = time_entry(eqs[i]);
    if (!te) {
      nest(eqs[i], 0, "", env);
      ++i;
      continue;
    }
    size_t j = i;
    bool backward = false;
    while (j < eqs.size() && time_entry(eqs[j])) {
      backward = backward || time_entry(eqs[j])->direction == Direction::Backward;
      ++j;
    }
    const auto& t = te->dim()->name;
    int64_t lo = param_int(full, lower_symbol(t)), hi = param_int(full, upper_symbol(t));
    env.vars.emplace_back(t, 0);
    for (int64_t k = 0; k <= hi - lo; ++k) {
      env.vars.back().second = backward ? hi - k : lo + k;
      for (size_t q = i; q < j; ++q) nest(eqs[q], 0, t, env);
    }
    env.vars.pop_back();
    i = j;
  }
}

}  // namespace stencil
