#pragma once

#include <string>
#include <vector>

#include "stencil/operator.hpp"

namespace stencil {

struct ReportOptions {
  /// Include per-pass wall times. Off by default so that the text is
  /// reproducible byte for byte.
  bool timings = false;
};

/// Per-pass op counts, per-cluster op counts before and after the DSE, the
/// op count of every mode, temporary footprint and the IET dump.
std::string report(const std::vector<Equation>& eqs, const CompileOptions& opts, const ReportOptions& ropts = {});

}  // namespace stencil
