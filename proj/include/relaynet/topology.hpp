#pragma once

#include <Eigen/Dense>

namespace relaynet {

/// Path-loss amplitude gain h = d^(-theta/2) of a log-distance model.
double gain(double distance, double pathloss_exponent);

// Node indexing: 0 is the source, 1..N are relays, N+1 is the destination.
struct Topology {
  int n_relays = 0;
  double pathloss_exponent = 2.0;
  Eigen::MatrixXd distances;     // (N+2)x(N+2), symmetric, zero diagonal
  Eigen::VectorXd tx_powers;     // indexed 0..N (destination does not transmit)
  Eigen::VectorXd noise_powers;  // indexed 1..N+1 (entry 0 unused)
  bool coherent = true;

  int n_nodes() const { return n_relays + 2; }
  double gain_between(int a, int b) const;

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

Topology make_topology(int n_relays, const Eigen::MatrixXd& distances,
                       double pathloss_exponent, double snr_db, bool coherent);

Topology topology_from_positions(int n_relays, const Eigen::MatrixXd& positions,
                                 double pathloss_exponent, double snr_db, bool coherent);

/// Two-relay collinear geometry: source at 0, destination at 1,
/// relay 1 at r, relay 2 at 1-r. All distances normalized to d(s,d)=1.
Topology two_relay_line_topology(double r, double pathloss_exponent, double snr_db, bool coherent);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace relaynet
