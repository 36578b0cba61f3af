#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stencil/lowering.hpp"

namespace stencil {

enum class DepKind { Flow, Anti, Output };
std::string to_string(DepKind k);

/// Distance along one dimension; nullopt means Unknown.
using Distance = std::optional<int64_t>;

struct Dependence {
  DepKind kind = DepKind::Flow;
  /// Equation ids; source executes first.
  int source = 0;
  int sink = 0;
  std::string function;
  Expr source_access;
  Expr sink_access;
  /// Common iteration dimensions and iteration(sink) - iteration(source) along each.
  std::vector<std::string> dims;
  std::vector<Distance> distance;
  /// Dimensions with a nonzero or Unknown distance.
  std::set<std::string> cause;
  bool is_reduction = false;

  /// Leading nonzero or Unknown entry exists.
  bool carried() const;
  /// Dimension carrying the dependence, if any.
  std::optional<std::string> carried_by() const;
  std::string str() const;
};

struct LamportResult {
  enum Kind { Value, Unknown, NoDep } kind = Unknown;
  int64_t distance = 0;
};

/// Distance along `dim` between two accesses to the same function:
/// iteration(b) - iteration(a) for both to touch the same element.
LamportResult lamport_test(const Expr& a, const Expr& b, const std::string& dim);

/// Full pairwise test over `dims`. nullopt: provably independent.
std::optional<std::vector<Distance>> distance_vector(const Expr& a, const Expr& b,
                                                     const std::vector<std::string>& dims);

struct DependenceSet {
  std::vector<Dependence> flow;
  std::vector<Dependence> anti;
  std::vector<Dependence> output;
  std::vector<Dependence> all() const;
};

/// Dependences from every equation of `a` to every equation of `b`; `a`
/// precedes `b` in program order. Reductions are dropped from the anti set.
DependenceSet get_dependences(const std::vector<LoweredEq>& a, const std::vector<LoweredEq>& b);

/// Every dependence among `eqs` (program order), including those between
/// accesses of a single equation.
std::vector<Dependence> all_dependences(const std::vector<LoweredEq>& eqs);

/// The access is the lhs of an increment, or its verbatim copy in that rhs.
bool is_increment_access(const LoweredEq& eq, const Expr& access);

}  // namespace stencil
