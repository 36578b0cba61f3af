#pragma once

#include <string>

#include "stencil/data.hpp"
#include "stencil/iet.hpp"

namespace stencil {

struct EmitOptions {
  std::string name = "Kernel";
  Precision precision = Precision::F64;
  /// Perfectly nested parallel loops are collapsed when the target has more
  /// cores than the threshold.
  int ncores = 1;
  int collapse_threshold = 16;
};

/// C99 translation unit with OpenMP pragma lines. Deterministic for a given
/// IET and options. Declarations are taken from place_declarations.
std::string emit_c(const IetPtr& iet, const EmitOptions& opts = {});

/// C text of an expression (value context).
std::string c_expr(const Expr& e);

}  // namespace stencil
