#pragma once

#include <string>
#include <vector>

#include "stencil/data.hpp"
#include "stencil/iet.hpp"

namespace stencil {

struct RunOptions {
  /// Worker threads for Parallel loops (Atomic loops always run serially).
  int workers = 1;
  /// Record every statement execution with the values of its loop variables.
  /// Forces serial execution.
  bool trace = false;
};

struct SectionStats {
  std::string name;
  double seconds = 0;
  /// Innermost-loop iterations executed inside the section.
  int64_t points = 0;
};

struct Visit {
  int eq = 0;
  /// (dimension, value) for each entry of the statement's iteration space.
  std::vector<std::pair<std::string, int64_t>> point;
};

struct RunReport {
  std::vector<SectionStats> sections;
  double seconds = 0;
  std::vector<Visit> trace;
  /// The parameters after default resolution.
  Params params;
};

/// Execute an IET over `buffers`. Missing parameters are resolved from the
/// IET's statements. Every access is bounds-checked; a violation throws
/// std::out_of_range.
RunReport run(const IetPtr& iet, Buffers& buffers, const Params& params, const RunOptions& opts = {});

/// Naive oracle: each equation in its own loop nest; equations over time share
/// the time loop with their time-dependent neighbours.
void reference_run(const std::vector<LoweredEq>& eqs, Buffers& buffers, const Params& params);

}  // namespace stencil
