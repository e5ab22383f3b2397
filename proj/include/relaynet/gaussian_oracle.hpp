#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "relaynet/allocation.hpp"
#include "relaynet/ordering.hpp"
#include "relaynet/mi_terms.hpp"
#include "relaynet/topology.hpp"

namespace relaynet {

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Conditional mutual information I(X;Y|Z) in bits of a circularly symmetric
/// complex Gaussian vector with the given component covariance (log-det form,
/// no 1/2 factor). Index sets select rows/columns of cov.
double gaussian_cond_mi_bits(const Eigen::MatrixXd& cov, const std::vector<int>& x,
                             const std::vector<int>& y, const std::vector<int>& z);

/// Monte-Carlo estimate of the same quantity from log-density ratios of
/// sampled vectors. Rejects non-PSD covariances and sample counts below 1e4.
McEstimate gaussian_mi_mc(const Eigen::MatrixXd& cov, const std::vector<int>& x,
                          const std::vector<int>& y, const std::vector<int>& z, int samples,
                          std::uint64_t seed);


// Joint linear-Gaussian model of every message, channel output and
// quantization in the network: observables are linear maps of independent
// unit messages plus channel and quantization noises. Serves as the
// independent route to every rate expression.
class GaussianNetworkModel {
 public:
  GaussianNetworkModel(const Topology& topo, const Ordering& ordering,
                       const PowerAllocation& alloc);

  bool has(const std::string& name) const;
  const std::vector<std::string>& observables() const { return obs_names_; }

  Eigen::MatrixXd covariance(const std::vector<std::string>& names) const;

  double cond_mi_bits(const std::vector<std::string>& x, const std::vector<std::string>& y,
                      const std::vector<std::string>& z) const;
  McEstimate cond_mi_mc(const std::vector<std::string>& x, const std::vector<std::string>& y,
                        const std::vector<std::string>& z, int samples,
                        std::uint64_t seed) const;

  /// Estimates many terms from one exact draw of the model's independent
  /// message and noise components (no covariance factorization involved).
  std::vector<McEstimate> cond_mi_mc_batch(const std::vector<MiTerm>& terms, int samples,
                                           std::uint64_t seed) const;

 private:
  std::vector<std::string> obs_names_;
  Eigen::MatrixXd coef_;        // observables x latents
  Eigen::VectorXd latent_var_;
  int row_of(const std::string& name) const;
};

}  // namespace relaynet
