#pragma once

#include <string>
#include <vector>

#include "relaynet/ordering.hpp"
#include "relaynet/pmf.hpp"

namespace relaynet {

// Variable naming shared by the discrete evaluator and the Gaussian oracle:
//   U<k>       source layer k
//   V<l>_<k>   level l's retransmission codeword for layer k
//   W<l>_<m>   level l's m-th quantization broadcast
//   Yh<l>_<m>  level l's m-th quantization
//   Y<l>       channel output at level l (Y<N+1> is the destination)
std::string var_U(int k);
std::string var_V(int l, int k);
std::string var_W(int l, int m);
std::string var_Yh(int l, int m);
std::string var_Y(int l);

// One conditional mutual information I(X; Y | Z).
struct MiTerm {
  std::vector<std::string> x, y, z;
};

// The information terms behind each achievability constraint, written on the
// shared variable names. Levels outside [1;N] and zero-length ranges are
// dropped; a level's own broadcast variables are always fully known to it.
MiTerm source_direct_term(int n_relays, const Ordering& ord, int k, int l);
MiTerm source_relay_term(int n_relays, const Ordering& ord, int k, int j, int l);
MiTerm broadcast_term(int n_relays, const Ordering& ord, int l, int j, int receiver);
MiTerm quantization_term(int n_relays, const Ordering& ord, int l, int m, int side_info_level);

struct DiscreteConstraint {
  std::string id;
  double bound = 0.0;
  int extremal_index = 0;  // minimizing level / receiver, maximizing side-info level
};

struct DiscreteBounds {
  std::vector<DiscreteConstraint> source;     // upper bounds, one per layer k
  std::vector<DiscreteConstraint> broadcast;  // upper bounds, one per (l, j)
  std::vector<DiscreteConstraint> quantization;  // lower bounds on cumulative rates, per (l, m)
};

/// Evaluates every constraint expression on an explicit joint pmf holding
/// all required variables.
DiscreteBounds discrete_rate_bounds(const JointPmf& pmf, int n_relays, const Ordering& ord);

}  // namespace relaynet
