#pragma once

#include <string>
#include <vector>

#include "stencil/expr.hpp"
#include "stencil/grid.hpp"

namespace stencil {

enum class Region { Domain, Interior };

struct Equation {
  Expr lhs;
  Expr rhs;
  Region region = Region::Domain;
  /// lhs = lhs + ...; concurrent updates of the same point are a reduction.
  bool is_increment = false;
};

Equation make_eq(const Expr& lhs, const Expr& rhs, Region region = Region::Domain);
std::string to_string(const Equation& eq);

/// Finite-difference weights for the derivative of order `deriv_order` at 0,
/// sampled at the given integer offsets (Fornberg's recursion, exact arithmetic).
std::vector<Number> fd_weights(int deriv_order, const std::vector<int>& offsets);
/// Offsets -fd_order/2 .. fd_order/2.
std::vector<int> centered_offsets(int fd_order);

/// Translate every access of `e` by `k` grid steps along `dim`.
Expr shift(const Expr& e, const DimPtr& dim, int k);

/// Centered FD approximation of d^deriv_order e / d dim^deriv_order.
/// `e` may be any expression; accesses are shifted point-wise.
Expr derivative(const Expr& e, const DimPtr& dim, int fd_order, int deriv_order);
/// Sum of second derivatives over the grid's space dimensions at the
/// highest space order found in `e`.
Expr laplace(const Expr& e);
/// Derivative and offset shortcuts: dx dy dz dx2 dy2 dz2 dt dt2 laplace forward backward.
Expr apply_suffix(const Expr& e, const std::string& suffix);

/// Largest space/time order among the functions accessed in `e` (0 if none).
int space_order_of(const Expr& e);
int time_order_of(const Expr& e);
/// Grid of the first grid-backed function accessed in `e`, or null.
GridPtr grid_of(const Expr& e);

/// Rhs such that `target = rhs` is equivalent to `e = 0`. Throws if target is
/// absent or occurs non-linearly.
Expr solve_for(const Expr& e, const Expr& target);

/// Integer offset form of a physical index: x + 2*h_x -> x + 2. Throws when
/// the index is not the dimension plus a multiple of its spacing.
Expr indexify_index(const Expr& index, const DimPtr& dim);
/// Array-form version of a function-form access (other nodes unchanged).
Expr indexify_access(const Expr& access);

/// Scatter `expr` into the time-function access `field` at the source points.
/// Produces 2^d increment equations.
std::vector<Equation> inject(const FunctionPtr& src, const Expr& field, const Expr& expr);
/// Gather the 2^d weighted corner values of `field_expr` into dst[t, p].
std::vector<Equation> interpolate(const FunctionPtr& dst, const Expr& field_expr);

}  // namespace stencil
