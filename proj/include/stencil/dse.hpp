#pragma once

#include <map>
#include <string>
#include <vector>

#include "stencil/clustering.hpp"

namespace stencil {

enum class DseMode { Basic, Advanced, Aggressive };
std::string to_string(DseMode m);
DseMode parse_dse_mode(const std::string& s);

struct DseOptions {
  DseMode mode = DseMode::Advanced;
  /// Minimum op count (exclusive) of time-invariant and time-varying extractions.
  int64_t thr_invariant = 10;
  int64_t thr_varying = 10;
};

/// Hands out temp0, temp1, ... continuing after any name already in use.
class TempNamer {
 public:
  TempNamer() = default;
  explicit TempNamer(const std::vector<Cluster>& existing);
  std::string next();

 private:
  int counter_ = 0;
};

// ---- individual passes ---------------------------------------------------------

/// Structural CSE over a cluster. Scalar temps that depend on no dimension are
/// returned separately in `hoisted` (when non-null) instead of the cluster.
Cluster cse(const Cluster& c, TempNamer& names, std::vector<LoweredEq>* hoisted = nullptr);
/// CSE on every cluster; hoisted temps go to a leading cluster with empty ISpace.
std::vector<Cluster> cse(const std::vector<Cluster>& clusters);

/// Leaves-first collection of common coefficients and factors in sums.
/// Never increases the op count.
Expr factorize(const Expr& e);
std::vector<Cluster> factorize(const std::vector<Cluster>& clusters);

// ---- aliases ---------------------------------------------------------------------

/// Offsets of one access along the loop variables of its indices.
struct Displacement {
  std::string label;
  std::vector<std::string> vars;
  std::vector<int64_t> offsets;
  /// Position is indexed by a space dimension (translation allowed).
  std::vector<bool> spatial;
};
using Displacements = std::vector<Displacement>;

/// Accesses of the (expanded, translation-normalized) candidate in canonical order.
Displacements calculate_displacements(const Expr& e);
/// Same operations on the same operands, ignoring offsets.
bool compare_ops(const Expr& a, const Expr& b);
/// Every displacement of `b` is the one of `a` plus one common vector that is
/// zero along non-space dimensions.
bool is_translated(const Displacements& a, const Displacements& b);
bool is_alias(const Expr& a, const Expr& b);

enum class AliasVerdict { Alias, DifferentOperands, DifferentLabel, DifferentDimensions, DifferentOperators, NoTranslation };
std::string to_string(AliasVerdict v);
/// is_alias with the first reason for a negative answer.
AliasVerdict classify_alias(const Expr& a, const Expr& b);

/// Translate all affine accesses of `e` by delta[var].
Expr translate(const Expr& e, const std::map<std::string, int64_t>& delta);

struct AliasGroup {
  std::vector<Expr> members;
  /// Translation of each member relative to the zero-reference form.
  std::vector<std::map<std::string, int64_t>> translations;
  /// Space dimensions spanned by the group, in first-appearance order.
  std::vector<std::string> dims;
  /// Chosen pivot origin and the resulting [lower, upper] read range per dim.
  std::map<std::string, int64_t> origin;
  std::map<std::string, std::pair<int64_t, int64_t>> extent;
  Expr pivot;
};

/// Greedy partition into alias classes: each round seeds a class with the first
/// remaining candidate.
std::vector<AliasGroup> detect_aliases(const std::vector<Expr>& candidates);
/// Choose pivot origins so that groups of equal translation width share one
/// extended iteration space; fills origin, extent and pivot.
void select_pivots(std::vector<AliasGroup>& groups);

enum class ExtractClass { TimeInvariant, TimeVarying };

/// Extraction + alias detection + pivot construction for one class.
std::vector<Cluster> extract(const std::vector<Cluster>& clusters, ExtractClass cls, int64_t threshold,
                             TempNamer& names);

/// Demote array temps that are only touched inside one cluster at the
/// write point to scalars.
std::vector<Cluster> contract_arrays(const std::vector<Cluster>& clusters);

std::vector<Cluster> run_dse(const std::vector<Cluster>& clusters, const DseOptions& opts);

// ---- metrics -------------------------------------------------------------------

int64_t cluster_ops(const Cluster& c);
/// Per-point op count of all clusters that iterate over the time dimension.
int64_t time_loop_ops(const std::vector<Cluster>& clusters);
/// Total elements of array temporaries.
int64_t temp_footprint(const std::vector<Cluster>& clusters);

/// Renumber equation ids in program order.
std::vector<Cluster> renumber(std::vector<Cluster> clusters);

}  // namespace stencil
