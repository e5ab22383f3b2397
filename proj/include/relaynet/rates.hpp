#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "relaynet/allocation.hpp"
#include "relaynet/ordering.hpp"
#include "relaynet/topology.hpp"

namespace relaynet {

/// Rate of a point-to-point complex Gaussian link at SNR x, in bits.
double capacity_fn(double x);

// Per-evaluation cache: level-indexed gains, powers and the square roots of
// the allocated powers behind every retransmission amplitude.
class RateContext {
 public:
  RateContext(const Topology& topo, const Ordering& ordering);

  void load(const PowerAllocation& alloc);

  int n_relays() const { return n_; }
  int destination() const { return n_ + 1; }
  const Ordering& ordering() const { return ord_; }
  const Topology& topology() const { return *topo_; }
  const PowerAllocation& allocation() const { return *alloc_; }

  double h(int a, int b) const { return gains_[a * (n_ + 2) + b]; }  // levels, 0 = source
  double power(int level) const { return powers_[level]; }
  double noise(int level) const { return noises_[level]; }

  /// Refinements whose cumulative broadcast rate clears the floor; computed
  /// by load().
  const std::vector<std::vector<bool>>& conveyed() const { return conveyed_; }
  double cumulative_broadcast_rate(int l, int m) const { return cum_rate_[l - 1][m - 1]; }

  // Combined receive amplitude of level l's message-k retransmission at
  // level m (relay levels k..l plus the source transmit it).
  double amplitude(int l, int k, int m) const;

  // Received power / cross-power of individual message components.
  double gamma_relay(int l, int k, int m) const;
  double gamma_source(int k, int m) const;
  double lambda_relay(int l, int k, int m, int mp) const;
  double lambda_source(int k, int m, int mp) const;

  // Sum of gamma_relay(l', k, m) over l' in [lo;hi], k in [klo;l'].
  double gamma_band(int m, int lo, int hi, int klo) const;
  double lambda_band(int m, int mp, int lo, int hi, int klo) const;
  // Sum of gamma_relay(l, k, m) over k in [klo;khi].
  double gamma_range(int l, int klo, int khi, int m) const;
  double gamma_source_range(int klo, int khi, int m) const;
  double lambda_source_range(int klo, int khi, int m, int mp) const;

  // Undecoded broadcast power at receiver level r once the broadcast
  // messages of levels [k;kp] are known; the receiver's own broadcast and
  // fully decoded senders contribute nothing.
  double residual_broadcast(int r, int k, int kp) const;

 private:
  int n_;
  const Topology* topo_;
  Ordering ord_;
  const PowerAllocation* alloc_ = nullptr;
  std::vector<double> gains_;   // (N+2)^2, level-indexed
  std::vector<double> powers_;  // by level, 0 = source
  std::vector<double> noises_;  // by level
  std::vector<double> sqrt_own_;                            // [k-1]
  std::vector<std::vector<double>> sqrt_src_;                // [l-1][k-1]
  std::vector<std::vector<std::vector<double>>> sqrt_relay_; // [j-1][l-j][k-1]
  std::vector<std::vector<bool>> conveyed_;
  std::vector<std::vector<double>> cum_rate_;
};

struct CovarianceAssembly {
  Eigen::MatrixXd matrix;       // row 0: own channel output; then quantization rows
  std::vector<int> row_levels;  // relay level behind each quantization row
};

struct SourceRateBound {
  double rate = 0.0;
  int min_level = 0;  // level attaining the minimum
  bool valid = true;  // false on a singular denominator
};

struct BroadcastRateBound {
  double rate = 0.0;
  int min_receiver = 0;
};

struct QuantConstraint {
  int level = 0;
  int refinement = 0;
  bool conveyed = false;  // positive cumulative broadcast rate
  double threshold = 0.0; // required noise tail
  double slack = 0.0;     // noise tail minus threshold (conveyed only)
};

struct RateReport {
  bool feasible = false;
  double total = 0.0;
  std::vector<double> source_rates;                  // [k-1]
  std::vector<std::vector<double>> broadcast_rates;  // [l-1][j-1]
  std::vector<int> min_levels;                       // argmin level per k
  std::vector<QuantConstraint> quant_constraints;
  std::vector<std::pair<std::string, double>> binding_constraints;
  std::string diagnostic;
};

/// Which refinements actually carry information: cumulative broadcast rate
/// above a 1e-9 bit floor. Refinements below it are treated as not conveyed
/// and dropped from every covariance assembly.
std::vector<std::vector<bool>> conveyed_refinements(const RateContext& ctx);

/// Covariance of the level-l channel output and the decoded quantizations of
/// levels 1..j-1 (conveyed ones only), given the first jp source layers.
/// j rows at most; validates symmetry/PSD when `validate` is set.
CovarianceAssembly covariance_matrix(const RateContext& ctx, int l, int j, int jp,
                                     bool validate = false);

// Individual information terms of the rate expressions, in bits.
/// Direct-decoding term of layer k at level l (log-det ratio of the two
/// covariance assemblies). Returns false on a singular denominator.
bool source_direct_mi(const RateContext& ctx, int k, int l, double& out);
/// Retransmission-chain term of layer k for sender level j decoded at l.
double source_relay_mi(const RateContext& ctx, int k, int j, int l);
/// Broadcast term of level l's refinement j at the receiver of rank kk
/// (kk in [j; M_l]; the receiver is refine_target(l, kk)).
double broadcast_mi(const RateContext& ctx, int l, int j, int kk);
/// Rate needed to convey refinement m of level l to the side-information
/// node of rank j (j in [m; M_l]), given the allocation's noise tails.
double quant_mi(const RateContext& ctx, int l, int m, int j);

SourceRateBound source_rate_bound(const RateContext& ctx, int k);
BroadcastRateBound broadcast_rate_bound(const RateContext& ctx, int l, int j);

/// Required quantization-noise tail for refinement m of level l given the
/// cumulative broadcast rate sum_{i<=m} rhat[l][i].
double quant_noise_threshold(const RateContext& ctx, int l, int m, double cum_rate);

/// Checks every conveyed refinement's noise tail against its threshold.
std::vector<QuantConstraint> quantization_feasible(
    const RateContext& ctx, const std::vector<std::vector<double>>& rhat);

/// Smallest feasible quantization noises for the allocation's alpha/beta;
/// refinements that convey nothing get zero noise.
void solve_min_quant_noise(const Topology& topo, const Ordering& ordering, PowerAllocation& alloc);
void solve_min_quant_noise(RateContext& ctx, PowerAllocation& alloc);

RateReport evaluate(const Topology& topo, const Ordering& ordering, const PowerAllocation& alloc);
RateReport evaluate(RateContext& ctx, const PowerAllocation& alloc);

}  // namespace relaynet
