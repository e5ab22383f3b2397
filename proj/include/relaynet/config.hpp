#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relaynet/allocation.hpp"
#include "relaynet/ordering.hpp"
#include "relaynet/topology.hpp"

namespace relaynet {

// Parsed form of the topology config file. Keys: n_relays, theta, snr_db,
// coherent, and either distance_matrix or positions. Unknown keys are errors.
struct TopologyConfig {
  int n_relays = 0;
  double theta = 2.0;
  double snr_db = 10.0;
  bool coherent = true;
  std::optional<Eigen::MatrixXd> distance_matrix;
  std::optional<Eigen::MatrixXd> positions;

  bool has_geometry() const { return distance_matrix.has_value() || positions.has_value(); }
  Topology build() const;                 // requires explicit geometry
  Topology build_line_geometry(double r) const;    // line geometry, requires n_relays == 2
};

TopologyConfig parse_topology_config(std::istream& in);
TopologyConfig parse_topology_config_file(const std::string& path);

// Allocation file: "alpha_own k = v", "alpha_src l k = v",
// "alpha_relay j l k = v", "beta l m = v", "nq l m = v", plus optional
// "levels = n1 n2 ..." and "refine_l = t1 t2 ..." ordering lines.
struct AllocationConfig {
  PowerAllocation allocation;
  Ordering ordering;
};

AllocationConfig parse_allocation_file(const std::string& path, int n_relays);

/// "a:b:n" inclusive grid with n points (n >= 2), or a single value "a".
std::vector<double> parse_grid(const std::string& spec);

}  // namespace relaynet
