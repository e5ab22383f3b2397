#pragma once

#include <vector>

namespace relaynet {

// Decoding structure of an N-relay network. Relay levels are 1..N, the
// destination is level N+1, the source is written as level 0 where a level
// index is needed. Level l decodes the first l partial source messages and
// emits M_l = N-l+1 quantization refinements; refinement i of level l is
// consumed by level refine_target(l, i).
class Ordering {
 public:
  Ordering() = default;

  // level_to_node: node id of each relay level, a permutation of 1..N.
  // refine_targets[l-1]: permutation of [l+1; N+1] giving refine_target(l, i).
  Ordering(std::vector<int> level_to_node, std::vector<std::vector<int>> refine_targets);

  static Ordering identity(int n_relays);

  int n_relays() const { return n_; }
  int destination_level() const { return n_ + 1; }
  int refinements(int level) const { return n_ - level + 1; }  // M_l

  /// Physical node id of a level (level 0 is the source, N+1 the destination).
  int node_of_level(int level) const;

  /// Target level of refinement i in [1; M_l] of relay level l.
  int refine_target(int level, int i) const;

  /// Refinement index of relay level l decoded at target level, or 0 if
  /// target is not downstream of l (nothing decoded).
  int refine_index(int level, int target) const;

  bool operator==(const Ordering& o) const;

 private:
  int n_ = 0;
  std::vector<int> level_to_node_;              // size N
  std::vector<std::vector<int>> refine_targets_;  // [l-1][i-1]
  std::vector<std::vector<int>> inverse_;         // [l-1][target-(l+1)] -> i
};

/// All (source ordering, per-level refinement ordering) combinations.
/// Exhaustive for N <= 3; identity only beyond that.
std::vector<Ordering> enumerate_orderings(int n_relays, bool include_refinements = true);

}  // namespace relaynet
