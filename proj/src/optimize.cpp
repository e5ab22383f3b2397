#include "relaynet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

namespace relaynet {

namespace {

struct Objective {
  RateContext* ctx;
  const ProtocolPreset* preset;
  std::vector<ParamRef> params;
  PowerAllocation scratch;
  long evals = 0;
  long budget = 0;

  bool exhausted() const { return evals >= budget; }

  double operator()(const std::vector<double>& x) {
    ++evals;
    scratch = PowerAllocation::zeros(preset->n_relays);
    for (size_t i = 0; i < params.size(); ++i) params[i].set(scratch, x[i]);
    project_allocation(*preset, scratch);
    if (preset->uses_quantization) solve_min_quant_noise(*ctx, scratch);
    const RateReport rep = evaluate(*ctx, scratch);
    return rep.feasible ? rep.total : 0.0;
  }

  std::vector<double> extract(const PowerAllocation& a) const {
    std::vector<double> x(params.size());
    for (size_t i = 0; i < params.size(); ++i) x[i] = params[i].get(a);
    return x;
  }
};

struct Candidate {
  std::vector<double> x;
  double value = -1.0;
};

// Coordinate descent with per-direction line search and shrinking steps.
void descend(Objective& f, Candidate& c, double step0, double min_step) {
  if (c.value < 0.0) c.value = f(c.x);
  for (double step = step0; step >= min_step && !f.exhausted(); step *= 0.5) {
    bool improved = true;
    while (improved && !f.exhausted()) {
      improved = false;
      for (size_t i = 0; i < c.x.size() && !f.exhausted(); ++i) {
        for (double dir : {step, -step}) {
          std::vector<double> y = c.x;
          y[i] = std::clamp(y[i] + dir, 0.0, 1.0);
          if (y[i] == c.x[i]) continue;
          double fy = f(y);
          if (fy > c.value + 1e-12) {
            c.x = std::move(y);
            c.value = fy;
            improved = true;
            // keep walking while the same move pays off
            while (!f.exhausted()) {
              std::vector<double> z = c.x;
              z[i] = std::clamp(z[i] + dir, 0.0, 1.0);
              if (z[i] == c.x[i]) break;
              double fz = f(z);
              if (fz <= c.value + 1e-12) break;
              c.x = std::move(z);
              c.value = fz;
            }
            break;
          }
          if (f.exhausted()) break;
        }
      }
    }
  }
}

std::vector<Candidate> build_seeds(const Objective& f, const ProtocolPreset& preset,
                                   const std::vector<PowerAllocation>& extra,
                                   std::uint64_t seed, int restarts) {
  const size_t d = f.params.size();
  std::vector<Candidate> seeds;
  auto push = [&](std::vector<double> x) { seeds.push_back({std::move(x), -1.0}); };

  // Warm starts go first so a tight budget still covers them.
  for (const auto& a : extra) {
    if (a.n_relays != preset.n_relays) continue;
    push(f.extract(a));
  }
  // Deterministic openers: idle, even split per node, all-in per parameter.
  push(std::vector<double>(d, 0.0));
  {
    std::vector<double> x(d, 0.0);
    std::vector<int> src_count(1, 0), relay_count(preset.n_relays + 1, 0);
    for (const auto& p : f.params) {
      if (p.kind == ParamRef::SrcOwn || p.kind == ParamRef::SrcSupport) ++src_count[0];
      if (p.kind == ParamRef::Relay) ++relay_count[p.a];
      if (p.kind == ParamRef::Beta) ++relay_count[p.a];
    }
    for (size_t i = 0; i < d; ++i) {
      const auto& p = f.params[i];
      if (p.kind == ParamRef::SrcOwn || p.kind == ParamRef::SrcSupport)
        x[i] = 1.0 / std::max(1, src_count[0]);
      else
        x[i] = 1.0 / std::max(1, relay_count[p.a]);
    }
    push(x);
  }
  for (size_t i = 0; i < d && i < 24; ++i) {
    std::vector<double> x(d, 0.0);
    x[i] = 1.0;
    // everyone else still spends full budget on their own strongest duty
    for (size_t jj = 0; jj < d; ++jj) {
      const auto& p = f.params[jj];
      if (jj != i && p.kind == ParamRef::Relay && p.a == p.b) x[jj] = 1.0;
    }
    push(x);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (static_cast<int>(seeds.size()) < restarts + static_cast<int>(extra.size())) {
    std::vector<double> x(d);
    for (auto& v : x) v = u(rng);
    push(std::move(x));
  }
  return seeds;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1) +
                    0x94d049bb133111ebull * (c + 1);
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

OptimizationResult optimize(const Topology& topo, const ProtocolPreset& preset,
                            const OptimizeOptions& opts) {
  if (opts.budget <= 0) throw std::invalid_argument("optimize: budget must be positive");
  if (preset.n_relays != topo.n_relays)
    throw std::invalid_argument("optimize: preset built for a different relay count");
  std::vector<Ordering> orderings =
      opts.search_orderings
          ? enumerate_orderings(topo.n_relays, preset.uses_quantization)
          : std::vector<Ordering>{Ordering::identity(topo.n_relays)};

  OptimizationResult best;
  if (opts.search_orderings && topo.n_relays > 3)
    best.diagnostic = "decoding-order search limited to the identity order beyond three relays";
  best.rate = -1.0;
  long total_evals = 0;
  int restarts_used = 0;
  const long per_ordering = std::max<long>(1, opts.budget / static_cast<long>(orderings.size()));

  for (size_t oi = 0; oi < orderings.size(); ++oi) {
    RateContext ctx(topo, orderings[oi]);
    Objective f{&ctx, &preset, preset.search_params(), PowerAllocation::zeros(preset.n_relays),
                0, per_ordering};
    if (f.params.empty()) {
      PowerAllocation a = PowerAllocation::zeros(preset.n_relays);
      project_allocation(preset, a);
      const RateReport rep = evaluate(ctx, a);
      if (rep.total > best.rate) {
        best.rate = rep.total;
        best.allocation = a;
        best.ordering = orderings[oi];
      }
      ++total_evals;
      continue;
    }
    auto seeds = build_seeds(f, preset, opts.seed_allocations,
                             mix_seed(opts.seed, oi, 17, 3), opts.restarts);
    Candidate local_best;
    local_best.value = -1.0;
    for (auto& s : seeds) {
      if (f.exhausted()) break;
      ++restarts_used;
      descend(f, s, 0.25, 1e-5);
      if (s.value > local_best.value) local_best = s;
    }
    // polish the ordering's winner with fine steps
    if (local_best.value >= 0.0 && !f.exhausted()) descend(f, local_best, 0.03125, 1e-5);
    // drop coordinates that contribute nothing to the winner
    if (local_best.value > 0.0) {
      for (size_t i = 0; i < f.params.size() && !f.exhausted(); ++i) {
        if (local_best.x[i] == 0.0) continue;
        std::vector<double> y = local_best.x;
        y[i] = 0.0;
        const double fy = f(y);
        if (fy >= local_best.value - 1e-12) {
          local_best.x = std::move(y);
          local_best.value = fy;
        }
      }
    }
    total_evals += f.evals;
    if (local_best.value > best.rate) {
      best.rate = local_best.value;
      best.allocation = PowerAllocation::zeros(preset.n_relays);
      for (size_t i = 0; i < f.params.size(); ++i)
        f.params[i].set(best.allocation, local_best.x[i]);
      project_allocation(preset, best.allocation);
      if (preset.uses_quantization)
        solve_min_quant_noise(topo, orderings[oi], best.allocation);
      best.ordering = orderings[oi];
    }
  }

  best.evaluations = total_evals;
  best.restarts_used = restarts_used;
  if (best.rate <= 0.0) {
    // nothing usable found; report the direct link
    PowerAllocation a = PowerAllocation::zeros(topo.n_relays);
    a.src_own(topo.n_relays + 1) = 1.0;
    const Ordering id = Ordering::identity(topo.n_relays);
    const RateReport rep = evaluate(topo, id, a);
    if (rep.feasible && rep.total > best.rate) {
      best.allocation = a;
      best.ordering = id;
      best.diagnostic = "degenerate search space, direct transmission fallback";
    }
  }
  best.report = evaluate(topo, best.ordering, best.allocation);
  best.rate = best.report.total;
  best.feasible = best.report.feasible;
  return best;
}

std::vector<SweepCell> sweep(const SweepOptions& opts) {
  std::vector<std::string> presets = opts.presets;
  // full_mixed last so it can be seeded with the other winners of its cell
  std::stable_partition(presets.begin(), presets.end(),
                        [](const std::string& s) { return s != "full_mixed"; });
  std::vector<SweepCell> cells(opts.r_values.size() * presets.size());
  int workers = opts.workers;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(opts.r_values.size())));

  std::mutex next_mutex;
  size_t next_r = 0;
  auto run_r = [&](size_t ri) {
    std::vector<PowerAllocation> cell_seeds;
    for (size_t pi = 0; pi < presets.size(); ++pi) {
      SweepCell& cell = cells[ri * presets.size() + pi];
      cell.r = opts.r_values[ri];
      cell.preset = presets[pi];
      cell.coherent = opts.coherent;
      cell.seed = mix_seed(opts.seed, ri, pi, opts.coherent ? 1 : 0);
      try {
        const Topology topo = two_relay_line_topology(cell.r, opts.theta, opts.snr_db, opts.coherent);
        ProtocolPreset p = preset(cell.preset, topo.n_relays, opts.coherent);
        OptimizeOptions oo;
        oo.seed = cell.seed;
        oo.budget = opts.budget;
        if (cell.preset == "full_mixed") oo.seed_allocations = cell_seeds;
        cell.result = optimize(topo, p, oo);
        cell.rate = cell.result.rate;
        cell.feasible = cell.result.feasible;
        cell_seeds.push_back(cell.result.allocation);
      } catch (const std::exception& e) {
        cell.status = e.what();
        cell.rate = 0.0;
        cell.feasible = false;
      }
    }
  };
  if (workers == 1) {
    for (size_t ri = 0; ri < opts.r_values.size(); ++ri) run_r(ri);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        while (true) {
          size_t ri;
          {
            std::lock_guard<std::mutex> lock(next_mutex);
            if (next_r >= opts.r_values.size()) return;
            ri = next_r++;
          }
          run_r(ri);
        }
      });
    for (auto& t : pool) t.join();
  }
  return cells;
}

}  // namespace relaynet
