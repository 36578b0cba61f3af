#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "stencil/grid.hpp"
#include "stencil/number.hpp"

namespace stencil {

enum class ExprKind : uint8_t { Constant, Symbol, Access, Add, Mul, Pow, Call };

class Expr;
struct ExprNode;

/// Immutable, structurally-compared expression handle.
///
/// All construction goes through the factory functions below, which keep the
/// tree in flattened canonical form: Add/Mul have at least two operands, no Add
/// is directly nested in an Add (likewise Mul), constants are folded, like
/// terms and like powers are collected, and operands are sorted by
/// `compare_exprs`. Division is represented as a Pow with exponent -1.
class Expr {
 public:
  Expr() = default;
  Expr(int v);  // NOLINT: numeric literals are ubiquitous in stencil code
  Expr(double v);  // NOLINT

  bool defined() const { return node_ != nullptr; }
  ExprKind kind() const;
  const ExprNode& node() const { return *node_; }
  const ExprNode* get() const { return node_.get(); }

  bool is_constant() const { return defined() && kind() == ExprKind::Constant; }
  bool is_symbol() const { return defined() && kind() == ExprKind::Symbol; }
  bool is_access() const { return defined() && kind() == ExprKind::Access; }
  bool is_add() const { return defined() && kind() == ExprKind::Add; }
  bool is_mul() const { return defined() && kind() == ExprKind::Mul; }
  bool is_pow() const { return defined() && kind() == ExprKind::Pow; }
  bool is_call() const { return defined() && kind() == ExprKind::Call; }

  const Number& number() const;
  const std::string& name() const;
  const std::vector<Expr>& operands() const;
  const Expr& operand(size_t i) const { return operands()[i]; }
  size_t size() const { return operands().size(); }
  int exponent() const;
  const DimPtr& dim() const;
  const FunctionPtr& function() const;
  bool array_form() const;
  size_t hash() const;

  std::string str() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;

  friend Expr make_node(ExprNode&& node);
};

enum class SymbolRole : uint8_t {
  Scalar,  // runtime parameter: dt, h_x, o_x, ...
  Index,   // loop/dimension variable
  Temp,    // compiler temporary
};

struct ExprNode {
  ExprKind kind = ExprKind::Constant;
  Number number;
  std::string name;
  SymbolRole role = SymbolRole::Scalar;
  DimPtr dim;
  FunctionPtr function;
  std::vector<Expr> operands;
  int exponent = 0;
  bool array_form = false;
  size_t hash = 0;
};

struct ExprHash {
  size_t operator()(const Expr& e) const { return e.hash(); }
};

template <typename V>
using ExprMap = std::unordered_map<Expr, V, ExprHash>;
using Substitutions = ExprMap<Expr>;

// ---- construction ---------------------------------------------------------

Expr constant(Number n);
Expr integer(int64_t v);
Expr rational(int64_t num, int64_t den);
Expr real(double v);
Expr symbol(const std::string& name, SymbolRole role = SymbolRole::Scalar);
/// The index variable of a dimension.
Expr index_of(const DimPtr& dim);
/// `array_form` accesses carry integer offsets (u[t+1, x-1]); function form
/// carries physical offsets (u(t + dt, x - h_x)).
Expr access(const FunctionPtr& fn, std::vector<Expr> indices, bool array_form);
/// u(t, x, ...) over the function's own dimensions.
Expr access(const FunctionPtr& fn);
Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, int exponent);
Expr call(const std::string& fn, std::vector<Expr> args);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

/// Same node kind with replaced operands, re-canonicalized.
Expr rebuild(const Expr& e, std::vector<Expr> operands);

// ---- ordering and inspection ---------------------------------------------

/// Total canonical order over expressions (<0, 0, >0).
int compare_exprs(const Expr& a, const Expr& b);
struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare_exprs(a, b) < 0; }
};

/// Split a term into numeric coefficient and the remaining product.
std::pair<Number, Expr> split_coefficient(const Expr& term);
/// Factors of a product (a single non-Mul expression yields itself).
std::vector<Expr> factors_of(const Expr& e);
/// Terms of a sum (a single non-Add expression yields itself).
std::vector<Expr> terms_of(const Expr& e);

/// Checks the flattened-form invariant recursively.
bool is_canonical(const Expr& e);

/// Pre-order visit. Return false from `fn` to skip a node's operands.
/// Access indices are visited only when `into_indices` is set.
void visit(const Expr& e, const std::function<bool(const Expr&)>& fn, bool into_indices = true);
/// Bottom-up rewrite; `fn` returns the replacement or an undefined Expr to keep the node.
Expr transform(const Expr& e, const std::function<Expr(const Expr&)>& fn, bool into_indices = true);

std::vector<Expr> collect_accesses(const Expr& e, bool into_indices = true);
bool contains(const Expr& haystack, const Expr& needle);
bool has_symbol(const Expr& e, const std::string& name);
/// Names of all Symbol nodes (scalars and indices).
std::vector<std::string> free_symbols(const Expr& e);

/// Simultaneous structural replacement followed by constant folding.
Expr substitute(const Expr& e, const Substitutions& rules);

/// Distribute products and positive integer powers over sums. Access indices
/// are left untouched.
Expr expand(const Expr& e);

/// Floating-point operation count. Integer index arithmetic is excluded and
/// each call to a builtin costs `call_weight`.
int64_t op_count(const Expr& e, int64_t call_weight = 50);
constexpr int64_t kDefaultCallWeight = 50;

// ---- evaluation -----------------------------------------------------------

struct EvalContext {
  std::function<double(const std::string&)> symbol;
  std::function<double(const Expr& access, const std::vector<int64_t>& idx)> load;
};
/// Plain recursive evaluation; indices are rounded to integers.
double evaluate(const Expr& e, const EvalContext& ctx);
/// Evaluate a builtin call on already-evaluated arguments.
double apply_builtin(const std::string& name, const std::vector<double>& args);
bool is_builtin(const std::string& name);

std::ostream& operator<<(std::ostream& os, const Expr& e);

}  // namespace stencil
