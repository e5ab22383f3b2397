#include "relaynet/topology.hpp"

#include <cmath>
#include <stdexcept>

namespace relaynet {

namespace {
constexpr double kMinDistance = 1e-6;  // floor against infinite gains
}

double gain(double distance, double pathloss_exponent) {
  if (!(distance > 0.0)) throw std::domain_error("gain: distance must be positive");
  if (!(pathloss_exponent > 0.0)) throw std::domain_error("gain: exponent must be positive");
  return std::pow(distance, -0.5 * pathloss_exponent);
}

double Topology::gain_between(int a, int b) const {
  return gain(distances(a, b), pathloss_exponent);
}

void Topology::validate() const {
  const int n = n_nodes();
  if (n_relays < 0) throw std::invalid_argument("topology: n_relays must be >= 0");
  if (distances.rows() != n || distances.cols() != n)
    throw std::invalid_argument("topology: distance matrix must be (N+2)x(N+2)");
  if (!(pathloss_exponent > 0.0))
    throw std::invalid_argument("topology: pathloss exponent must be positive");
  for (int i = 0; i < n; ++i) {
    if (distances(i, i) != 0.0)
      throw std::invalid_argument("topology: distance matrix diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (std::abs(distances(i, j) - distances(j, i)) > 1e-12)
        throw std::invalid_argument("topology: distance matrix must be symmetric");
      if (!(distances(i, j) >= kMinDistance))
        throw std::invalid_argument("topology: node distance below minimum");
    }
  }
  if (tx_powers.size() != n_relays + 1)
    throw std::invalid_argument("topology: need one tx power per transmitting node");
  if (noise_powers.size() != n_relays + 2)
    throw std::invalid_argument("topology: need one noise power per receiving node");
  for (int i = 0; i <= n_relays; ++i)
    if (!(tx_powers(i) > 0.0)) throw std::invalid_argument("topology: tx powers must be positive");
  for (int i = 1; i <= n_relays + 1; ++i)
    if (!(noise_powers(i) > 0.0))
      throw std::invalid_argument("topology: noise powers must be positive");
}

Topology make_topology(int n_relays, const Eigen::MatrixXd& distances,
                       double pathloss_exponent, double snr_db, bool coherent) {
  Topology t;
  t.n_relays = n_relays;
  t.distances = distances;
  t.pathloss_exponent = pathloss_exponent;
  t.coherent = coherent;
  // Unit noise everywhere; equal tx powers fixed by the source-destination SNR.
  const double p = db_to_linear(snr_db);
  t.tx_powers = Eigen::VectorXd::Constant(n_relays + 1, p);
  t.noise_powers = Eigen::VectorXd::Ones(n_relays + 2);
  t.validate();
  return t;
}

Topology topology_from_positions(int n_relays, const Eigen::MatrixXd& positions,
                                 double pathloss_exponent, double snr_db, bool coherent) {
  const int n = n_relays + 2;
  if (positions.rows() != n)
    throw std::invalid_argument("topology: need one position per node");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      d(i, j) = (positions.row(i) - positions.row(j)).norm();
      d(j, i) = d(i, j);
    }
  return make_topology(n_relays, d, pathloss_exponent, snr_db, coherent);
}

Topology two_relay_line_topology(double r, double pathloss_exponent, double snr_db, bool coherent) {
  if (!(r >= -0.5 && r <= 0.5)) throw std::domain_error("two_relay_line_topology: r must lie in [-0.5, 0.5]");
  Eigen::MatrixXd pos(4, 1);
  pos << 0.0, r, 1.0 - r, 1.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (std::abs(pos(i, 0) - pos(j, 0)) < kMinDistance)
        throw std::domain_error("two_relay_line_topology: degenerate node placement");
  return topology_from_positions(2, pos, pathloss_exponent, snr_db, coherent);
}

}  // namespace relaynet
