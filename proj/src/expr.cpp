#include "stencil/expr.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace stencil {

namespace {

size_t mix(size_t seed, size_t v) { return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)); }

size_t compute_hash(const ExprNode& n) {
  size_t h = std::hash<int>{}(static_cast<int>(n.kind));
  switch (n.kind) {
    case ExprKind::Constant:
      return mix(h, n.number.hash());
    case ExprKind::Symbol:
      return mix(mix(h, std::hash<std::string>{}(n.name)), static_cast<size_t>(n.role));
    default:
      break;
  }
  h = mix(h, std::hash<std::string>{}(n.name));
  h = mix(h, std::hash<int>{}(n.exponent));
  h = mix(h, n.array_form ? 1 : 0);
  for (const auto& op : n.operands) h = mix(h, op.hash());
  return h;
}

int kind_rank(ExprKind k) {
  switch (k) {
    case ExprKind::Constant: return 0;
    case ExprKind::Symbol: return 1;
    case ExprKind::Pow: return 2;
    case ExprKind::Access: return 3;
    case ExprKind::Call: return 4;
    case ExprKind::Mul: return 5;
    case ExprKind::Add: return 6;
  }
  return 7;
}

int role_rank(SymbolRole r) {
  switch (r) {
    case SymbolRole::Index: return 0;
    case SymbolRole::Scalar: return 1;
    case SymbolRole::Temp: return 2;
  }
  return 3;
}

int compare_lists(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = 0; i < a.size(); ++i)
    if (int c = compare_exprs(a[i], b[i]); c != 0) return c;
  return 0;
}

const std::vector<Expr> kNoOperands;

}  // namespace

Expr make_node(ExprNode&& node) {
  node.hash = compute_hash(node);
  return Expr(std::make_shared<const ExprNode>(std::move(node)));
}

namespace {

Expr make_nary(ExprKind kind, std::vector<Expr> sorted) {
  ExprNode n;
  n.kind = kind;
  n.operands = std::move(sorted);
  return make_node(std::move(n));
}

Expr raw_pow(const Expr& base, int exponent) {
  ExprNode n;
  n.kind = ExprKind::Pow;
  n.operands = {base};
  n.exponent = exponent;
  return make_node(std::move(n));
}

void sort_canonical(std::vector<Expr>& v) {
  std::sort(v.begin(), v.end(), [](const Expr& a, const Expr& b) { return compare_exprs(a, b) < 0; });
}

}  // namespace

Expr::Expr(int v) : Expr(integer(v)) {}
Expr::Expr(double v) : Expr(real(v)) {}

ExprKind Expr::kind() const { return node_->kind; }
const Number& Expr::number() const { return node_->number; }
const std::string& Expr::name() const { return node_->name; }
const std::vector<Expr>& Expr::operands() const { return node_ ? node_->operands : kNoOperands; }
int Expr::exponent() const { return node_->exponent; }
const DimPtr& Expr::dim() const { return node_->dim; }
const FunctionPtr& Expr::function() const { return node_->function; }
bool Expr::array_form() const { return node_->array_form; }
size_t Expr::hash() const { return node_ ? node_->hash : 0; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->hash != b.node_->hash) return false;
  return compare_exprs(a, b) == 0;
}

int compare_exprs(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  if (!a.defined() || !b.defined()) return a.defined() ? 1 : -1;
  int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case ExprKind::Constant:
      return a.number().compare(b.number());
    case ExprKind::Symbol:
      // Index variables sort ahead of scalars so that x - h_x reads naturally.
      if (int ra2 = role_rank(a.node().role), rb2 = role_rank(b.node().role); ra2 != rb2) return ra2 < rb2 ? -1 : 1;
      if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
      return 0;
    case ExprKind::Pow:
      if (int c = compare_exprs(a.operand(0), b.operand(0)); c != 0) return c;
      if (a.exponent() != b.exponent()) return a.exponent() < b.exponent() ? -1 : 1;
      return 0;
    case ExprKind::Access:
    case ExprKind::Call:
      if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
      if (a.kind() == ExprKind::Access && a.array_form() != b.array_form()) return a.array_form() ? 1 : -1;
      return compare_lists(a.operands(), b.operands());
    case ExprKind::Add:
    case ExprKind::Mul:
      return compare_lists(a.operands(), b.operands());
  }
  return 0;
}

// ---- leaves ----------------------------------------------------------------

Expr constant(Number n) {
  ExprNode node;
  node.kind = ExprKind::Constant;
  node.number = n;
  return make_node(std::move(node));
}
Expr integer(int64_t v) { return constant(Number::integer(v)); }
Expr rational(int64_t num, int64_t den) { return constant(Number::rational(num, den)); }
Expr real(double v) { return constant(Number::real(v)); }

Expr symbol(const std::string& name, SymbolRole role) {
  ExprNode node;
  node.kind = ExprKind::Symbol;
  node.name = name;
  node.role = role;
  return make_node(std::move(node));
}

Expr index_of(const DimPtr& dim) {
  ExprNode node;
  node.kind = ExprKind::Symbol;
  node.name = dim->name;
  node.role = SymbolRole::Index;
  node.dim = dim;
  return make_node(std::move(node));
}

Expr access(const FunctionPtr& fn, std::vector<Expr> indices, bool array_form) {
  if (indices.size() != fn->ndim())
    throw std::invalid_argument("access to '" + fn->name + "' expects " + std::to_string(fn->ndim()) +
                                " indices, got " + std::to_string(indices.size()));
  ExprNode node;
  node.kind = ExprKind::Access;
  node.name = fn->name;
  node.function = fn;
  node.operands = std::move(indices);
  node.array_form = array_form;
  return make_node(std::move(node));
}

Expr access(const FunctionPtr& fn) {
  std::vector<Expr> idx;
  for (const auto& d : fn->dims) idx.push_back(index_of(d));
  return access(fn, std::move(idx), false);
}

// ---- sums and products ------------------------------------------------------

std::pair<Number, Expr> split_coefficient(const Expr& term) {
  if (term.is_constant()) return {term.number(), integer(1)};
  if (term.is_mul() && term.operand(0).is_constant()) {
    const auto& ops = term.operands();
    if (ops.size() == 2) return {ops[0].number(), ops[1]};
    return {ops[0].number(), make_nary(ExprKind::Mul, std::vector<Expr>(ops.begin() + 1, ops.end()))};
  }
  return {Number::integer(1), term};
}

std::vector<Expr> factors_of(const Expr& e) { return e.is_mul() ? e.operands() : std::vector<Expr>{e}; }
std::vector<Expr> terms_of(const Expr& e) { return e.is_add() ? e.operands() : std::vector<Expr>{e}; }

Expr add(std::vector<Expr> terms) {
  Number const_sum = Number::integer(0);
  bool saw_const = false;
  std::vector<std::pair<Expr, Number>> collected;
  ExprMap<size_t> slot;
  auto absorb = [&](const Expr& t) {
    if (t.is_constant()) {
      const_sum = const_sum + t.number();
      saw_const = true;
      return;
    }
    auto [c, rest] = split_coefficient(t);
    auto it = slot.find(rest);
    if (it == slot.end()) {
      slot.emplace(rest, collected.size());
      collected.emplace_back(rest, c);
    } else {
      collected[it->second].second = collected[it->second].second + c;
    }
  };
  for (const auto& t : terms) {
    if (!t.defined()) throw std::invalid_argument("undefined term in sum");
    if (t.is_add())
      for (const auto& inner : t.operands()) absorb(inner);
    else
      absorb(t);
  }
  std::vector<Expr> out;
  for (auto& [rest, c] : collected) {
    if (c.is_zero()) continue;
    out.push_back(c.is_one() ? rest : mul({constant(c), rest}));
  }
  // A float zero from folding still marks the sum as floating point.
  if (saw_const && (!const_sum.is_zero() || (out.empty() && !const_sum.is_exact()))) out.push_back(constant(const_sum));
  if (out.empty()) return integer(0);
  if (out.size() == 1) return out[0];
  sort_canonical(out);
  return make_nary(ExprKind::Add, std::move(out));
}

Expr mul(std::vector<Expr> factors) {
  Number coeff = Number::integer(1);
  std::vector<std::pair<Expr, int>> bases;
  ExprMap<size_t> slot;
  auto absorb = [&](const Expr& f) {
    if (f.is_constant()) {
      coeff = coeff * f.number();
      return;
    }
    Expr base = f;
    int e = 1;
    if (f.is_pow()) {
      base = f.operand(0);
      e = f.exponent();
    }
    auto it = slot.find(base);
    if (it == slot.end()) {
      slot.emplace(base, bases.size());
      bases.emplace_back(base, e);
    } else {
      bases[it->second].second += e;
    }
  };
  for (const auto& f : factors) {
    if (!f.defined()) throw std::invalid_argument("undefined factor in product");
    if (f.is_mul())
      for (const auto& inner : f.operands()) absorb(inner);
    else
      absorb(f);
  }
  if (coeff.is_zero()) return constant(coeff.is_exact() ? Number::integer(0) : Number::real(0.0));
  std::vector<Expr> out;
  for (auto& [base, e] : bases) {
    if (e == 0) continue;
    Expr p = e == 1 ? base : pow(base, e);
    if (p.is_constant()) {
      coeff = coeff * p.number();
    } else if (p.is_mul()) {
      for (const auto& inner : p.operands()) {
        if (inner.is_constant())
          coeff = coeff * inner.number();
        else
          out.push_back(inner);
      }
    } else {
      out.push_back(p);
    }
  }
  if (coeff.is_zero()) return integer(0);
  if (out.empty()) return constant(coeff);
  if (!coeff.is_one()) out.push_back(constant(coeff));
  if (out.size() == 1) return out[0];
  sort_canonical(out);
  return make_nary(ExprKind::Mul, std::move(out));
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return integer(1);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    if (base.number().is_zero() && exponent < 0) throw std::domain_error("zero raised to a negative power");
    return constant(base.number().pow(exponent));
  }
  if (base.is_pow()) return pow(base.operand(0), base.exponent() * exponent);
  if (base.is_mul()) {
    std::vector<Expr> fs;
    for (const auto& f : base.operands()) fs.push_back(pow(f, exponent));
    return mul(std::move(fs));
  }
  return raw_pow(base, exponent);
}

bool is_builtin(const std::string& name) {
  static const std::set<std::string> names = {"sin", "cos", "sqrt", "floor", "min", "max"};
  return names.count(name) > 0;
}

double apply_builtin(const std::string& name, const std::vector<double>& a) {
  if (name == "sin") return std::sin(a.at(0));
  if (name == "cos") return std::cos(a.at(0));
  if (name == "sqrt") return std::sqrt(a.at(0));
  if (name == "floor") return std::floor(a.at(0));
  if (name == "min") return std::min(a.at(0), a.at(1));
  if (name == "max") return std::max(a.at(0), a.at(1));
  throw std::invalid_argument("unknown builtin '" + name + "'");
}

Expr call(const std::string& fn, std::vector<Expr> args) {
  if (!is_builtin(fn)) throw std::invalid_argument("unknown builtin '" + fn + "'");
  size_t arity = (fn == "min" || fn == "max") ? 2 : 1;
  if (args.size() != arity)
    throw std::invalid_argument(fn + " expects " + std::to_string(arity) + " argument(s)");
  if (std::all_of(args.begin(), args.end(), [](const Expr& a) { return a.is_constant(); })) {
    if (fn == "floor" && args[0].number().is_exact()) {
      const Number& n = args[0].number();
      int64_t q = n.num() / n.den();
      if (n.num() % n.den() != 0 && n.num() < 0) --q;
      return integer(q);
    }
    if ((fn == "min" || fn == "max") && args[0].number().is_exact() && args[1].number().is_exact()) {
      bool first = args[0].number().compare(args[1].number()) <= 0;
      return (fn == "min") == first ? args[0] : args[1];
    }
    std::vector<double> v;
    for (const auto& a : args) v.push_back(a.number().value());
    return real(apply_builtin(fn, v));
  }
  ExprNode node;
  node.kind = ExprKind::Call;
  node.name = fn;
  node.operands = std::move(args);
  return make_node(std::move(node));
}

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({integer(-1), b})}); }
Expr operator-(const Expr& a) { return mul({integer(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, -1)}); }

Expr rebuild(const Expr& e, std::vector<Expr> ops) {
  switch (e.kind()) {
    case ExprKind::Add: return add(std::move(ops));
    case ExprKind::Mul: return mul(std::move(ops));
    case ExprKind::Pow: return pow(ops.at(0), e.exponent());
    case ExprKind::Call: return call(e.name(), std::move(ops));
    case ExprKind::Access: return access(e.function(), std::move(ops), e.array_form());
    default: return e;
  }
}

bool is_canonical(const Expr& e) {
  if (!e.defined()) return false;
  switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Mul: {
      const auto& ops = e.operands();
      if (ops.size() < 2) return false;
      int constants = 0;
      for (size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].kind() == e.kind()) return false;
        if (ops[i].is_constant()) {
          ++constants;
          if (e.is_mul() && ops[i].number().is_one()) return false;
          if (ops[i].number().is_zero()) return false;
        }
        if (i > 0 && compare_exprs(ops[i - 1], ops[i]) >= 0) return false;
        if (!is_canonical(ops[i])) return false;
      }
      return constants <= 1;
    }
    case ExprKind::Pow: {
      const Expr& b = e.operand(0);
      if (e.exponent() == 0 || e.exponent() == 1) return false;
      if (b.is_constant() || b.is_pow() || b.is_mul()) return false;
      return is_canonical(b);
    }
    case ExprKind::Access:
    case ExprKind::Call:
      return std::all_of(e.operands().begin(), e.operands().end(), [](const Expr& o) { return is_canonical(o); });
    default:
      return true;
  }
}

// ---- traversal -------------------------------------------------------------

void visit(const Expr& e, const std::function<bool(const Expr&)>& fn, bool into_indices) {
  if (!fn(e)) return;
  if (e.is_access() && !into_indices) return;
  for (const auto& op : e.operands()) visit(op, fn, into_indices);
}

Expr transform(const Expr& e, const std::function<Expr(const Expr&)>& fn, bool into_indices) {
  Expr current = e;
  if (!e.operands().empty() && (into_indices || !e.is_access())) {
    std::vector<Expr> ops;
    ops.reserve(e.size());
    bool changed = false;
    for (const auto& op : e.operands()) {
      ops.push_back(transform(op, fn, into_indices));
      changed |= ops.back().get() != op.get();
    }
    if (changed) current = rebuild(e, std::move(ops));
  }
  Expr r = fn(current);
  return r.defined() ? r : current;
}

std::vector<Expr> collect_accesses(const Expr& e, bool into_indices) {
  std::vector<Expr> out;
  visit(
      e,
      [&](const Expr& n) {
        if (n.is_access()) out.push_back(n);
        return true;
      },
      into_indices);
  return out;
}

bool contains(const Expr& haystack, const Expr& needle) {
  bool found = false;
  visit(haystack, [&](const Expr& n) {
    if (found) return false;
    if (n == needle) found = true;
    return !found;
  });
  return found;
}

bool has_symbol(const Expr& e, const std::string& name) {
  bool found = false;
  visit(e, [&](const Expr& n) {
    if (n.is_symbol() && n.name() == name) found = true;
    return !found;
  });
  return found;
}

std::vector<std::string> free_symbols(const Expr& e) {
  std::set<std::string> names;
  visit(e, [&](const Expr& n) {
    if (n.is_symbol()) names.insert(n.name());
    return true;
  });
  return {names.begin(), names.end()};
}

Expr substitute(const Expr& e, const Substitutions& rules) {
  if (rules.empty()) return e;
  if (auto it = rules.find(e); it != rules.end()) return it->second;
  if (e.operands().empty()) return e;
  std::vector<Expr> ops;
  bool changed = false;
  for (const auto& op : e.operands()) {
    ops.push_back(substitute(op, rules));
    changed |= ops.back().get() != op.get();
  }
  return changed ? rebuild(e, std::move(ops)) : e;
}

Expr expand(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Add: {
      std::vector<Expr> ts;
      for (const auto& t : e.operands()) ts.push_back(expand(t));
      return add(std::move(ts));
    }
    case ExprKind::Mul: {
      std::vector<Expr> acc = {integer(1)};
      for (const auto& f : e.operands()) {
        Expr ef = expand(f);
        std::vector<Expr> next;
        for (const auto& a : acc)
          for (const auto& t : terms_of(ef)) next.push_back(mul({a, t}));
        acc = std::move(next);
      }
      return add(std::move(acc));
    }
    case ExprKind::Pow: {
      Expr b = expand(e.operand(0));
      if (e.exponent() < 0 || !b.is_add()) return pow(b, e.exponent());
      // Distribute term by term: mul({r, b}) with r == b would fold back into a power.
      Expr r = b;
      for (int i = 1; i < e.exponent(); ++i) {
        std::vector<Expr> next;
        for (const auto& x : terms_of(r))
          for (const auto& y : terms_of(b)) next.push_back(expand(mul({x, y})));
        r = add(std::move(next));
      }
      return r;
    }
    case ExprKind::Call: {
      std::vector<Expr> args;
      for (const auto& a : e.operands()) args.push_back(expand(a));
      return call(e.name(), std::move(args));
    }
    default:
      return e;
  }
}

// ---- cost model ---------------------------------------------------------------

int64_t op_count(const Expr& e, int64_t call_weight) {
  switch (e.kind()) {
    case ExprKind::Constant:
    case ExprKind::Symbol:
    case ExprKind::Access:
      return 0;
    case ExprKind::Add: {
      int64_t n = static_cast<int64_t>(e.size()) - 1;
      for (const auto& t : e.operands()) n += op_count(t, call_weight);
      return n;
    }
    case ExprKind::Mul: {
      int64_t slots = 0, n = 0;
      bool any_numerator = false;
      for (const auto& f : e.operands()) {
        if (f.is_constant()) {
          if (!f.number().is_minus_one()) {
            ++slots;
            any_numerator = true;
          }
          continue;
        }
        ++slots;
        if (f.is_pow()) {
          int k = std::abs(f.exponent());
          n += (k - 1) + op_count(f.operand(0), call_weight);
          if (f.exponent() > 0) any_numerator = true;
        } else {
          n += op_count(f, call_weight);
          any_numerator = true;
        }
      }
      // Every factor is a reciprocal: one extra division for 1/(...).
      return n + std::max<int64_t>(slots - 1, 0) + (any_numerator ? 0 : 1);
    }
    case ExprKind::Pow: {
      int k = std::abs(e.exponent());
      return (k - 1) + (e.exponent() < 0 ? 1 : 0) + op_count(e.operand(0), call_weight);
    }
    case ExprKind::Call: {
      if (e.name() == "min" || e.name() == "max") return 0;
      int64_t n = call_weight;
      for (const auto& a : e.operands()) n += op_count(a, call_weight);
      return n;
    }
  }
  return 0;
}

// ---- evaluation ---------------------------------------------------------------

double evaluate(const Expr& e, const EvalContext& ctx) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return e.number().value();
    case ExprKind::Symbol:
      return ctx.symbol(e.name());
    case ExprKind::Access: {
      std::vector<int64_t> idx;
      idx.reserve(e.size());
      for (const auto& i : e.operands()) idx.push_back(static_cast<int64_t>(std::llround(evaluate(i, ctx))));
      return ctx.load(e, idx);
    }
    case ExprKind::Add: {
      double s = 0;
      for (const auto& t : e.operands()) s += evaluate(t, ctx);
      return s;
    }
    case ExprKind::Mul: {
      double p = 1;
      for (const auto& f : e.operands()) p *= evaluate(f, ctx);
      return p;
    }
    case ExprKind::Pow: {
      double b = evaluate(e.operand(0), ctx);
      int k = e.exponent();
      double r = 1;
      for (int i = 0; i < std::abs(k); ++i) r *= b;
      return k < 0 ? 1.0 / r : r;
    }
    case ExprKind::Call: {
      std::vector<double> args;
      for (const auto& a : e.operands()) args.push_back(evaluate(a, ctx));
      return apply_builtin(e.name(), args);
    }
  }
  return 0;
}

// ---- printing -------------------------------------------------------------------

namespace {

enum Prec { kAdd = 1, kMul = 2, kPow = 3, kAtom = 4 };

void print(std::ostream& os, const Expr& e, int ctx);

void print_product(std::ostream& os, const Expr& e, int ctx) {
  // Numerator factors, then denominator factors from negative exponents.
  std::vector<Expr> num, den;
  Number coeff = Number::integer(1);
  for (const auto& f : factors_of(e)) {
    if (f.is_constant())
      coeff = f.number();
    else if (f.is_pow() && f.exponent() < 0)
      den.push_back(pow(f.operand(0), -f.exponent()));
    else
      num.push_back(f);
  }
  bool paren = ctx > kMul;
  if (paren) os << "(";
  bool negative = coeff.is_negative();
  Number mag = coeff.abs();
  if (mag.is_exact() && mag.den() != 1) {
    den.insert(den.begin(), integer(mag.den()));
    mag = Number::integer(mag.num());
  }
  if (negative) os << "-";
  bool first = true;
  if (!mag.is_one() || num.empty()) {
    os << mag.str();
    first = false;
  }
  for (const auto& f : num) {
    if (!first) os << "*";
    print(os, f, kMul);
    first = false;
  }
  if (!den.empty()) {
    os << "/";
    if (den.size() == 1) {
      print(os, den[0], kPow);
    } else {
      os << "(";
      for (size_t i = 0; i < den.size(); ++i) {
        if (i) os << "*";
        print(os, den[i], kMul);
      }
      os << ")";
    }
  }
  if (paren) os << ")";
}

void print(std::ostream& os, const Expr& e, int ctx) {
  if (!e.defined()) {
    os << "<undef>";
    return;
  }
  switch (e.kind()) {
    case ExprKind::Constant: {
      bool paren = e.number().is_negative() && ctx > kAdd;
      if (paren) os << "(";
      os << e.number().str();
      if (paren) os << ")";
      return;
    }
    case ExprKind::Symbol:
      os << e.name();
      return;
    case ExprKind::Access: {
      os << e.name() << (e.array_form() ? "[" : "(");
      for (size_t i = 0; i < e.size(); ++i) {
        if (i) os << ", ";
        print(os, e.operand(i), kAdd);
      }
      os << (e.array_form() ? "]" : ")");
      return;
    }
    case ExprKind::Add: {
      bool paren = ctx > kAdd;
      if (paren) os << "(";
      std::vector<Expr> terms = e.operands();
      // Constants read best at the end.
      std::stable_partition(terms.begin(), terms.end(), [](const Expr& t) { return !t.is_constant(); });
      for (size_t i = 0; i < terms.size(); ++i) {
        auto [c, rest] = split_coefficient(terms[i]);
        if (i > 0) {
          if (c.is_negative()) {
            os << " - ";
            print(os, -terms[i], kAdd + 1);
          } else {
            os << " + ";
            print(os, terms[i], kAdd + 1);
          }
        } else {
          print(os, terms[i], kAdd + 1);
        }
      }
      if (paren) os << ")";
      return;
    }
    case ExprKind::Mul:
      print_product(os, e, ctx);
      return;
    case ExprKind::Pow: {
      if (e.exponent() < 0) {
        print_product(os, e, ctx);
        return;
      }
      bool paren = ctx > kPow;
      if (paren) os << "(";
      print(os, e.operand(0), kAtom);
      os << "**" << e.exponent();
      if (paren) os << ")";
      return;
    }
    case ExprKind::Call: {
      os << e.name() << "(";
      for (size_t i = 0; i < e.size(); ++i) {
        if (i) os << ", ";
        print(os, e.operand(i), kAdd);
      }
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string Expr::str() const {
  std::ostringstream os;
  print(os, *this, 0);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.str(); }

}  // namespace stencil
