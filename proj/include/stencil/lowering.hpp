#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stencil/expr.hpp"
#include "stencil/symbolic.hpp"

namespace stencil {

enum class Direction { Forward, Backward, Any };
char direction_char(Direction d);

/// [d_m + lower, d_M + upper]. An Interior interval iterates d_m+1 .. d_M-1;
/// the offsets are relative to that shrunk range.
struct Interval {
  DimPtr dim;
  int64_t lower = 0;
  int64_t upper = 0;
  Region region = Region::Domain;

  const std::string& name() const { return dim->name; }
  std::string str() const;
  friend bool operator==(const Interval& a, const Interval& b);
  friend bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }
};

struct IterEntry {
  Interval interval;
  Direction direction = Direction::Any;
  const DimPtr& dim() const { return interval.dim; }
  friend bool operator==(const IterEntry& a, const IterEntry& b) {
    return a.interval == b.interval && a.direction == b.direction;
  }
  friend bool operator!=(const IterEntry& a, const IterEntry& b) { return !(a == b); }
};

struct IterationSpace {
  std::vector<IterEntry> entries;

  size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  std::optional<size_t> find(const std::string& dim_name) const;
  std::vector<std::string> dim_names() const;
  std::string str() const;
  friend bool operator==(const IterationSpace& a, const IterationSpace& b) { return a.entries == b.entries; }
  friend bool operator!=(const IterationSpace& a, const IterationSpace& b) { return !(a == b); }
};

/// Extent touched along one position of one function.
struct DataExtent {
  DimPtr dim;
  int64_t lower = 0;
  int64_t upper = 0;
  /// Index is a pure integer (constant interval, not relative to a loop).
  bool constant = false;
  /// Index is not affine in a loop variable (sparse floor indices).
  bool opaque = false;
  std::string str() const;
};

struct DataSpace {
  std::map<std::string, std::vector<DataExtent>> functions;
  /// Hull per iteration dimension across functions; modulo-buffered time reads excluded.
  std::vector<Interval> summary;
  std::string str() const;
};

/// Execution guard: the statement runs when dim % factor == 0.
struct Guard {
  DimPtr dim;
  int factor = 1;
  /// "t%4 == 0"
  std::string str() const;
  friend bool operator==(const Guard& a, const Guard& b) { return a.dim->name == b.dim->name && a.factor == b.factor; }
};

struct LoweredEq {
  int id = 0;
  /// Access in array form, or a Temp symbol for scalar temporaries.
  Expr lhs;
  Expr rhs;
  IterationSpace ispace;
  DataSpace dspace;
  bool is_increment = false;
  Region region = Region::Domain;
  std::vector<Guard> guards;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  /// Indices already include halo+padding.
  bool aligned = false;
  std::vector<std::string> diagnostics;

  std::string str() const;
};

/// c*var + offset; `var` empty for pure constants.
struct AffineIndex {
  bool affine = false;
  std::string var;
  Number coeff = Number::integer(0);
  int64_t offset = 0;
};
AffineIndex affine_index(const Expr& index);

/// Array-form version of the equation with conditional dimensions replaced by
/// parent/factor and their guards recorded.
LoweredEq indexify(const Equation& eq);
/// Shift every index by the halo+padding of the accessed function.
LoweredEq align_domain(const LoweredEq& eq);
Expr align_expr(const Expr& e);
/// Inverse of align_expr (for display).
Expr unalign_expr(const Expr& e);
/// Fill ispace, dspace, inputs, outputs and local directions.
LoweredEq analyze(const LoweredEq& eq);
/// indexify + align_domain + analyze for each equation, numbering them in order.
std::vector<LoweredEq> lower(const std::vector<Equation>& eqs, const Substitutions& subs = {});

/// Loop variables of an index expression, resolved to their dimensions.
std::vector<DimPtr> index_dims(const Expr& access);

/// Largest loop range [lo, hi] per dimension that keeps every access of the
/// given equations inside its allocation.
struct DimBounds {
  std::optional<int64_t> lo, hi;
};
std::map<std::string, DimBounds> access_bounds(const std::vector<LoweredEq>& eqs);

/// Name of the spacing-free loop bound symbols: x_m, x_M.
std::string lower_symbol(const std::string& dim);
std::string upper_symbol(const std::string& dim);

}  // namespace stencil
