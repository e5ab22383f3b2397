#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relaynet/presets.hpp"
#include "relaynet/rates.hpp"

namespace relaynet {

struct OptimizeOptions {
  std::uint64_t seed = 1;
  long budget = 200000;  // objective evaluations, split over orderings
  int restarts = 32;
  bool search_orderings = true;
  std::vector<PowerAllocation> seed_allocations;
};

struct OptimizationResult {
  double rate = 0.0;
  bool feasible = false;
  PowerAllocation allocation;
  Ordering ordering;
  long evaluations = 0;
  int restarts_used = 0;
  std::string diagnostic;
  RateReport report;  // recomputed from scratch on the winning allocation
};

OptimizationResult optimize(const Topology& topo, const ProtocolPreset& preset,
                            const OptimizeOptions& opts);

struct SweepCell {
  double r = 0.0;
  std::string preset;
  bool coherent = true;
  double rate = 0.0;
  bool feasible = false;
  std::uint64_t seed = 0;
  std::string status = "ok";
  OptimizationResult result;
};

struct SweepOptions {
  double theta = 4.0;
  double snr_db = 10.0;
  bool coherent = true;
  std::vector<double> r_values;
  std::vector<std::string> presets;
  std::uint64_t seed = 1;
  long budget = 200000;
  int workers = 0;  // 0: hardware concurrency
};

/// Optimizes every preset on the two-relay line geometry per grid point.
/// full_mixed cells are seeded with the other presets' optima of the same
/// cell. Deterministic for a fixed seed regardless of worker count.
std::vector<SweepCell> sweep(const SweepOptions& opts);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace relaynet
