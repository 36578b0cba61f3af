#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "stencil/clustering.hpp"

namespace stencil {

enum class IetKind { Block, Iteration, Expression, Conditional, Section };

enum class LoopProperty { Sequential, Parallel, Vectorizable, Atomic, Blocked };
std::string to_string(LoopProperty p);

struct Declaration {
  std::string name;
  /// Array temporaries carry their (possibly block-shrunk) declaration.
  FunctionPtr array;
  /// One instance per worker of the enclosing parallel loop.
  bool per_thread = false;
  /// Declared inside a parallel loop body (private to each iteration).
  bool is_private = false;
};

struct IetNode;
using IetPtr = std::shared_ptr<IetNode>;

struct IetNode {
  IetKind kind = IetKind::Block;

  // Iteration. Bounds are [d_m + lower, d_M + upper] after the region shrink,
  // block loops included (they step by `step`). An intra-block loop (block
  // set) runs [db + lower, min(db + step - 1, d_M + clamp) + upper].
  DimPtr dim;
  Interval interval;
  Direction direction = Direction::Any;
  std::set<LoopProperty> props;
  int64_t step = 1;
  DimPtr block;
  int64_t clamp = 0;

  // Expression
  LoweredEq eq;
  int cluster = -1;

  // Conditional
  std::vector<Guard> guards;

  // Section
  std::string name;

  std::vector<Declaration> decls;
  std::vector<IetPtr> children;

  bool is_loop() const { return kind == IetKind::Iteration; }
  bool has(LoopProperty p) const { return props.count(p) > 0; }
};

IetPtr make_block(std::vector<IetPtr> children = {});
IetPtr make_iteration(const IterEntry& entry);
IetPtr make_expression(const LoweredEq& eq, int cluster);
IetPtr make_conditional(const std::vector<Guard>& guards);
IetPtr clone(const IetPtr& n);

/// Schedule clusters into a loop tree, sharing the longest common loop prefix.
IetPtr build_iet(const std::vector<Cluster>& clusters);

/// Mark Iterations Sequential / Parallel (+Vectorizable innermost space loops,
/// +Atomic when only reductions are carried).
IetPtr analyze_iet(const IetPtr& iet);

/// Block the Parallel loops over the given dimensions. Producer nests that
/// only feed the following nest through temporaries share its block loops.
/// Throws std::invalid_argument when a requested dimension is Sequential.
IetPtr block_loops(const IetPtr& iet, const std::map<std::string, int64_t>& shape);

/// Time each candidate through `runner` and return the first fastest shape.
using BlockShape = std::map<std::string, int64_t>;
BlockShape autotune_blocks(const IetPtr& iet, const std::function<double(const IetPtr&)>& runner,
                           const std::vector<BlockShape>& candidates);
/// Powers of two from 4 to 64 along each blockable dimension.
std::vector<BlockShape> default_block_candidates(const IetPtr& iet);

/// Attach declarations of temporaries to their innermost dominating scope.
IetPtr place_declarations(const IetPtr& iet);

/// Wrap every loop nest directly under the time loop (or the root) in a
/// profiling Section.
IetPtr add_sections(const IetPtr& iet);

/// Expression statements in program order.
std::vector<IetPtr> statements(const IetPtr& iet);
/// Every Iteration in pre-order.
std::vector<IetPtr> iterations(const IetPtr& iet);
/// Names of Section nodes in pre-order.
std::vector<std::string> section_names(const IetPtr& iet);

/// Dimensions that a blocked IET could block (parallel space loops).
std::vector<std::string> blockable_dims(const IetPtr& iet);

/// Human-readable arrow tree of loops, guards and statements.
std::string dump(const IetPtr& iet, bool with_properties = true);

/// Loop header bounds as text: "x_m + 1", "min(xb + 7, x_M - 1) + 2", ...
std::string lower_bound_text(const IetNode& it);
std::string upper_bound_text(const IetNode& it);

/// Concrete loop range; `value` resolves x_m, x_M and enclosing loop variables.
struct LoopRange {
  int64_t lo = 0;
  int64_t hi = -1;
  int64_t step = 1;
};
LoopRange loop_range(const IetNode& it, const std::function<int64_t(const std::string&)>& value);
/// Name of the loop variable (the dimension name, e.g. "x" or "xb").
const std::string& loop_var(const IetNode& it);
/// The dimension whose bounds x_m/x_M apply (the parent for block loops).
const Dimension& bound_dim(const IetNode& it);

}  // namespace stencil
