#include "relaynet/ordering.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace relaynet {

Ordering::Ordering(std::vector<int> level_to_node, std::vector<std::vector<int>> refine_targets)
    : n_(static_cast<int>(level_to_node.size())),
      level_to_node_(std::move(level_to_node)),
      refine_targets_(std::move(refine_targets)) {
  std::vector<int> sorted = level_to_node_;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n_; ++i)
    if (sorted[i] != i + 1) throw std::invalid_argument("ordering: level map must permute 1..N");
  if (static_cast<int>(refine_targets_.size()) != n_)
    throw std::invalid_argument("ordering: need one refinement order per relay level");
  inverse_.resize(n_);
  for (int l = 1; l <= n_; ++l) {
    auto& tgts = refine_targets_[l - 1];
    const int m = n_ - l + 1;
    if (static_cast<int>(tgts.size()) != m)
      throw std::invalid_argument("ordering: refinement order has wrong length");
    std::vector<int> seen = tgts;
    std::sort(seen.begin(), seen.end());
    for (int i = 0; i < m; ++i)
      if (seen[i] != l + 1 + i)
        throw std::invalid_argument("ordering: refinement order must permute [l+1; N+1]");
    inverse_[l - 1].assign(m, 0);
    for (int i = 0; i < m; ++i) inverse_[l - 1][tgts[i] - (l + 1)] = i + 1;
  }
}

Ordering Ordering::identity(int n_relays) {
  std::vector<int> levels(n_relays);
  std::iota(levels.begin(), levels.end(), 1);
  std::vector<std::vector<int>> refine(n_relays);
  for (int l = 1; l <= n_relays; ++l) {
    refine[l - 1].resize(n_relays - l + 1);
    std::iota(refine[l - 1].begin(), refine[l - 1].end(), l + 1);
  }
  return Ordering(std::move(levels), std::move(refine));
}

int Ordering::node_of_level(int level) const {
  if (level == 0) return 0;
  if (level == n_ + 1) return n_ + 1;
  if (level < 1 || level > n_) throw std::out_of_range("ordering: level out of range");
  return level_to_node_[level - 1];
}

int Ordering::refine_target(int level, int i) const {
  if (level < 1 || level > n_) throw std::out_of_range("ordering: relay level out of range");
  if (i < 1 || i > refinements(level)) throw std::out_of_range("ordering: refinement out of range");
  return refine_targets_[level - 1][i - 1];
}

int Ordering::refine_index(int level, int target) const {
  if (level < 1 || level > n_) throw std::out_of_range("ordering: relay level out of range");
  if (target <= level || target > n_ + 1) return 0;
  return inverse_[level - 1][target - (level + 1)];
}

bool Ordering::operator==(const Ordering& o) const {
  return n_ == o.n_ && level_to_node_ == o.level_to_node_ && refine_targets_ == o.refine_targets_;
}

std::vector<Ordering> enumerate_orderings(int n_relays, bool include_refinements) {
  if (n_relays > 3 || n_relays < 0) return {Ordering::identity(std::max(n_relays, 0))};
  std::vector<int> levels(n_relays);
  std::iota(levels.begin(), levels.end(), 1);
  std::vector<Ordering> out;
  std::sort(levels.begin(), levels.end());
  do {
    if (!include_refinements) {
      std::vector<std::vector<int>> refine(n_relays);
      for (int l = 1; l <= n_relays; ++l) {
        refine[l - 1].resize(n_relays - l + 1);
        std::iota(refine[l - 1].begin(), refine[l - 1].end(), l + 1);
      }
      out.emplace_back(levels, refine);
      continue;
    }
    // Cartesian product of the per-level refinement permutations.
    std::vector<std::vector<std::vector<int>>> per_level(n_relays);
    for (int l = 1; l <= n_relays; ++l) {
      std::vector<int> tgts(n_relays - l + 1);
      std::iota(tgts.begin(), tgts.end(), l + 1);
      do {
        per_level[l - 1].push_back(tgts);
      } while (std::next_permutation(tgts.begin(), tgts.end()));
    }
    std::vector<int> pick(n_relays, 0);
    while (true) {
      std::vector<std::vector<int>> refine(n_relays);
      for (int l = 0; l < n_relays; ++l) refine[l] = per_level[l][pick[l]];
      out.emplace_back(levels, refine);
      int c = n_relays - 1;
      while (c >= 0) {
        if (++pick[c] < static_cast<int>(per_level[c].size())) break;
        pick[c] = 0;
        --c;
      }
      if (c < 0) break;
    }
  } while (std::next_permutation(levels.begin(), levels.end()));
  if (out.empty()) out.push_back(Ordering::identity(n_relays));
  return out;
}

}  // namespace relaynet
