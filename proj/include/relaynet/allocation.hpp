#pragma once

#include <string>
#include <vector>

namespace relaynet {

// Power split of every transmitter. All alpha/beta entries are fractions of
// the owning node's budget; quant_noise entries are linear variances of the
// successive quantization stages.
//
// Index conventions (all 1-based, mirroring relay levels):
//   alpha_src_own[k]          source power on its k-th message layer, k in [1;N+1]
//   alpha_src_support[l][k]   source power spent supporting level l's message-k
//                             retransmission, 1 <= k <= l <= N
//   alpha_relay[j][l][k]      level j's power on level l's message-k
//                             retransmission, k <= j <= l <= N
//   beta[l][m]                level l's power on its m-th quantization
//                             broadcast, m in [1;M_l]
//   quant_noise[l][m]         variance added by quantization stage m of level l
struct PowerAllocation {
  int n_relays = 0;
  std::vector<double> alpha_src_own;                    // [k-1]
  std::vector<std::vector<double>> alpha_src_support;   // [l-1][k-1]
  std::vector<std::vector<std::vector<double>>> alpha_relay;  // [j-1][l-j][k-1]
  std::vector<std::vector<double>> beta;                // [l-1][m-1]
  std::vector<std::vector<double>> quant_noise;         // [l-1][m-1]

  static PowerAllocation zeros(int n_relays);

  double& src_own(int k) { return alpha_src_own[k - 1]; }
  double src_own(int k) const { return alpha_src_own[k - 1]; }
  double& src_support(int l, int k) { return alpha_src_support[l - 1][k - 1]; }
  double src_support(int l, int k) const { return alpha_src_support[l - 1][k - 1]; }
  double& relay(int j, int l, int k) { return alpha_relay[j - 1][l - j][k - 1]; }
  double relay(int j, int l, int k) const { return alpha_relay[j - 1][l - j][k - 1]; }
  double& bcast(int l, int m) { return beta[l - 1][m - 1]; }
  double bcast(int l, int m) const { return beta[l - 1][m - 1]; }
  double& noise(int l, int m) { return quant_noise[l - 1][m - 1]; }
  double noise(int l, int m) const { return quant_noise[l - 1][m - 1]; }

  double source_budget_used() const;
  double relay_budget_used(int level) const;

  /// Sum of beta[l][from..M_l].
  double beta_tail(int l, int from) const;
  /// Sum of quant_noise[l][from..M_l].
  double noise_tail(int l, int from) const;
};

/// Empty diagnostic string when the allocation satisfies the per-node budget
/// constraints (tolerance 1e-9), the index-shape invariants and, when
/// coherent is false, has no cross-codebook support power.
std::string check_allocation(const PowerAllocation& a, bool coherent);

}  // namespace relaynet
