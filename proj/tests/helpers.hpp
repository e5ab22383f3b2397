#pragma once

#include <random>

#include "relaynet/gaussian_oracle.hpp"
#include "relaynet/optimize.hpp"
#include "relaynet/rates.hpp"
#include "relaynet/mi_terms.hpp"

namespace relaynet::testing {

// Random strictly positive allocation with per-node budgets below 1 and
// minimal feasible quantization noises.
inline PowerAllocation random_allocation(std::mt19937_64& rng, const Topology& topo,
                                         const Ordering& ord, bool with_broadcast = true) {
  const int n = topo.n_relays;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  PowerAllocation a = PowerAllocation::zeros(n);
  for (int k = 1; k <= n + 1; ++k) a.src_own(k) = u(rng);
  if (topo.coherent)
    for (int l = 1; l <= n; ++l)
      for (int k = 1; k <= l; ++k) a.src_support(l, k) = u(rng);
  for (int j = 1; j <= n; ++j)
    for (int l = j; l <= n; ++l) {
      if (!topo.coherent && l != j) continue;
      for (int k = 1; k <= j; ++k) a.relay(j, l, k) = u(rng);
    }
  for (int l = 1; l <= n; ++l)
    for (int m = 1; m <= ord.refinements(l); ++m)
      a.bcast(l, m) = with_broadcast ? u(rng) : 0.0;
  // scale every node into a random fraction of its budget
  std::uniform_real_distribution<double> budget(0.5, 0.98);
  {
    const double used = a.source_budget_used();
    const double s = budget(rng) / used;
    for (auto& v : a.alpha_src_own) v *= s;
    for (auto& row : a.alpha_src_support)
      for (auto& v : row) v *= s;
  }
  for (int l = 1; l <= n; ++l) {
    const double used = a.relay_budget_used(l);
    if (used == 0.0) continue;
    const double s = budget(rng) / used;
    for (auto& row : a.alpha_relay[l - 1])
      for (auto& v : row) v *= s;
    for (auto& v : a.beta[l - 1]) v *= s;
  }
  solve_min_quant_noise(topo, ord, a);
  return a;
}

/// Level permutations combined with the canonical monotone refinement order.
inline std::vector<Ordering> level_orderings(int n_relays) {
  return enumerate_orderings(n_relays, false);
}

struct OracleEquivalenceStats {
  int terms_checked = 0;
  int mc_violations = 0;
  double worst_z = 0.0;
  int identity_violations = 0;
  double worst_identity = 0.0;
};

// Shared body of the oracle-equivalence check: random feasible allocations,
// every rate term compared against the synthesized-signal estimate, plus the
// scalar det-ratio identity.
inline OracleEquivalenceStats oracle_equivalence_run(std::uint64_t alloc_base,
                                                     std::uint64_t mc_base, int allocations,
                                                     int samples) {
  OracleEquivalenceStats stats;
  std::mt19937_64 rng(alloc_base);
  std::uniform_real_distribution<double> ur(-0.45, 0.45);
  for (int trial = 0; trial < allocations; ++trial) {
    const int n = (trial % 2) + 1;
    const bool coherent = (trial % 4) < 2;
    Topology topo;
    if (n == 2) {
      double r = ur(rng);
      if (std::abs(r) < 0.02) r = 0.17;
      topo = two_relay_line_topology(r, 4.0, 10.0, coherent);
    } else {
      Eigen::MatrixXd pos(3, 1);
      pos << 0.0, 0.2 + 0.5 * std::abs(ur(rng)), 1.0;
      topo = topology_from_positions(1, pos, 3.0, 8.0, coherent);
    }
    const auto orderings = level_orderings(n);
    const Ordering& ord = orderings[trial % orderings.size()];
    const PowerAllocation alloc = random_allocation(rng, topo, ord);
    RateContext ctx(topo, ord);
    ctx.load(alloc);
    const GaussianNetworkModel model(topo, ord, alloc);
    const auto& conveyed = ctx.conveyed();

    auto filter_conveyed = [&](std::vector<std::string> vars) {
      std::vector<std::string> out;
      for (const auto& v : vars) {
        if (v.rfind("Yh", 0) == 0) {
          const auto us = v.find('_');
          const int l = std::stoi(v.substr(2, us - 2));
          const int m = std::stoi(v.substr(us + 1));
          if (!conveyed[l - 1][m - 1]) continue;
        }
        out.push_back(v);
      }
      return out;
    };

    std::vector<MiTerm> terms;
    std::vector<double> engine_vals;
    for (int k = 1; k <= n + 1; ++k)
      for (int l = k; l <= n + 1; ++l) {
        double e;
        if (!source_direct_mi(ctx, k, l, e)) continue;
        MiTerm tm = source_direct_term(n, ord, k, l);
        tm.y = filter_conveyed(tm.y);
        terms.push_back(tm);
        engine_vals.push_back(e);
        for (int j = k; j <= l - 1; ++j) {
          terms.push_back(source_relay_term(n, ord, k, j, l));
          engine_vals.push_back(source_relay_mi(ctx, k, j, l));
        }
      }
    for (int l = 1; l <= n; ++l)
      for (int j = 1; j <= ord.refinements(l); ++j)
        for (int kk = j; kk <= ord.refinements(l); ++kk) {
          terms.push_back(broadcast_term(n, ord, l, j, ord.refine_target(l, kk)));
          engine_vals.push_back(broadcast_mi(ctx, l, j, kk));
        }
    for (int l = 1; l <= n; ++l)
      for (int m = 1; m <= ord.refinements(l); ++m) {
        if (!conveyed[l - 1][m - 1]) continue;
        for (int j = m; j <= ord.refinements(l); ++j) {
          terms.push_back(quantization_term(n, ord, l, m, ord.refine_target(l, j)));
          engine_vals.push_back(quant_mi(ctx, l, m, j));
        }
      }

    const auto estimates = model.cond_mi_mc_batch(terms, samples, mix_seed(mc_base, trial, 0, 0));
    for (size_t i = 0; i < estimates.size(); ++i) {
      ++stats.terms_checked;
      const double err = std::abs(estimates[i].value - engine_vals[i]);
      const double z = err / std::max(estimates[i].stderr_, 1e-300);
      stats.worst_z = std::max(stats.worst_z, z);
      if (err > 3.0 * estimates[i].stderr_) ++stats.mc_violations;
    }

    for (int l = 1; l <= n + 1; ++l) {
      double e;
      if (!source_direct_mi(ctx, 1, l, e)) continue;
      const double sig = ctx.gamma_source(1, l);
      const double interference = ctx.gamma_band(l, l + 1, n, l + 1) +
                                  ctx.gamma_source_range(2, n + 1, l) +
                                  ctx.residual_broadcast(l, 1, l) + ctx.noise(l);
      const double closed = capacity_fn(sig / interference);
      const double rel = std::abs(e - closed) / std::max(1e-12, std::abs(closed));
      stats.worst_identity = std::max(stats.worst_identity, rel);
      if (rel > 1e-9) ++stats.identity_violations;
    }
  }
  return stats;
}

}  // namespace relaynet::testing
