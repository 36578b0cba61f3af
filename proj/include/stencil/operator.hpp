#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "stencil/codegen.hpp"
#include "stencil/dse.hpp"
#include "stencil/interpreter.hpp"

namespace stencil {

struct CompileOptions {
  DseOptions dse;
  /// Explicit block size per dimension; empty leaves the loops unblocked.
  BlockShape block;
  /// Pick the block shape by timing candidates on zeroed data.
  bool autotune = false;
  /// Parameters for the autotuning runs (t_M must be bound).
  Params autotune_params;
  Precision precision = Precision::F64;
  EmitOptions emit;
};

/// One compilation stage: wall time and, for cluster-level passes, the
/// cluster count and per-point op counts after it.
struct PassRecord {
  std::string pass;
  double seconds = 0;
  bool measured = false;
  size_t clusters = 0;
  /// Clusters inside the time loop.
  int64_t ops = 0;
  /// All clusters.
  int64_t total_ops = 0;
};

struct Operator {
  uint64_t hash = 0;
  std::vector<LoweredEq> lowered;
  /// Clusters before and after the DSE.
  std::vector<Cluster> initial;
  std::vector<Cluster> clusters;
  IetPtr iet;
  BlockShape block;
  Precision precision = Precision::F64;
  std::string source;
  std::vector<std::string> sections;
  std::vector<PassRecord> passes;

  /// Zeroed buffers for every function the operator touches.
  Buffers allocate() const;
  RunReport apply(Buffers& buffers, const Params& params, const RunOptions& opts = {}) const;
};
using OperatorPtr = std::shared_ptr<const Operator>;

/// Canonical text of everything that determines the generated operator.
std::string operator_key(const std::vector<Equation>& eqs, const CompileOptions& opts);
/// FNV-1a of operator_key: a content hash over the equations, the functions they touch and the options.
uint64_t operator_hash(const std::vector<Equation>& eqs, const CompileOptions& opts);

/// Uncached compilation: lower, cluster, DSE, IET, block, declare, emit.
OperatorPtr compile(const std::vector<Equation>& eqs, const CompileOptions& opts = {});

/// Memo of compiled operators keyed by operator_hash.
class OperatorCache {
 public:
  OperatorPtr compile(const std::vector<Equation>& eqs, const CompileOptions& opts = {});

  int64_t hits() const { return hits_; }
  int64_t misses() const { return misses_; }
  /// Passes executed by the most recent compile (0 on a hit).
  int64_t last_pass_work() const { return last_pass_work_; }
  /// Passes executed over the cache's lifetime.
  int64_t pass_work() const { return pass_work_; }
  size_t size() const { return entries_.size(); }
  void clear();

 private:
  std::mutex mutex_;
  std::unordered_map<std::string, OperatorPtr> entries_;
  int64_t hits_ = 0;
  int64_t misses_ = 0;
  int64_t last_pass_work_ = 0;
  int64_t pass_work_ = 0;
};

}  // namespace stencil
