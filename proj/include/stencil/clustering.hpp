#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "stencil/dependence.hpp"
#include "stencil/lowering.hpp"

namespace stencil {

struct Cluster {
  std::vector<LoweredEq> eqs;
  IterationSpace ispace;
  /// Dimensions along which no further grouping may happen.
  std::set<std::string> atomics;
  std::vector<Guard> guards;

  std::string str() const;
};

/// Expected iteration directions per dimension, from every equation's local
/// directions plus cross-equation flow dependences.
std::map<std::string, std::set<Direction>> detect_flow_directions(const std::vector<LoweredEq>& eqs);
std::vector<LoweredEq> enforce_directions(const std::vector<LoweredEq>& eqs);
std::vector<Cluster> group(const std::vector<LoweredEq>& eqs);
/// Split clusters whose equations carry different guards.
std::vector<Cluster> apply_control_flow(const std::vector<Cluster>& clusters);
/// enforce_directions + group + apply_control_flow
std::vector<Cluster> clusterize(const std::vector<LoweredEq>& eqs);

std::vector<LoweredEq> flatten(const std::vector<Cluster>& clusters);
bool same_guards(const std::vector<Guard>& a, const std::vector<Guard>& b);

}  // namespace stencil
