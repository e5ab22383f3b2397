#include "relaynet/allocation.hpp"

#include <cmath>
#include <sstream>

namespace relaynet {

PowerAllocation PowerAllocation::zeros(int n) {
  PowerAllocation a;
  a.n_relays = n;
  a.alpha_src_own.assign(n + 1, 0.0);
  a.alpha_src_support.resize(n);
  a.alpha_relay.resize(n);
  a.beta.resize(n);
  a.quant_noise.resize(n);
  for (int l = 1; l <= n; ++l) {
    a.alpha_src_support[l - 1].assign(l, 0.0);
    a.alpha_relay[l - 1].resize(n - l + 1);
    for (int lp = l; lp <= n; ++lp) a.alpha_relay[l - 1][lp - l].assign(l, 0.0);
    a.beta[l - 1].assign(n - l + 1, 0.0);
    a.quant_noise[l - 1].assign(n - l + 1, 0.0);
  }
  return a;
}

double PowerAllocation::source_budget_used() const {
  double s = 0.0;
  for (double v : alpha_src_own) s += v;
  for (const auto& row : alpha_src_support)
    for (double v : row) s += v;
  return s;
}

double PowerAllocation::relay_budget_used(int level) const {
  double s = 0.0;
  for (const auto& row : alpha_relay[level - 1])
    for (double v : row) s += v;
  for (double v : beta[level - 1]) s += v;
  return s;
}

double PowerAllocation::beta_tail(int l, int from) const {
  double s = 0.0;
  for (int m = from; m <= static_cast<int>(beta[l - 1].size()); ++m) s += beta[l - 1][m - 1];
  return s;
}

double PowerAllocation::noise_tail(int l, int from) const {
  double s = 0.0;
  for (int m = from; m <= static_cast<int>(quant_noise[l - 1].size()); ++m)
    s += quant_noise[l - 1][m - 1];
  return s;
}

std::string check_allocation(const PowerAllocation& a, bool coherent) {
  const int n = a.n_relays;
  constexpr double kTol = 1e-9;
  std::ostringstream err;
  if (static_cast<int>(a.alpha_src_own.size()) != n + 1 ||
      static_cast<int>(a.alpha_src_support.size()) != n ||
      static_cast<int>(a.alpha_relay.size()) != n || static_cast<int>(a.beta.size()) != n ||
      static_cast<int>(a.quant_noise.size()) != n)
    return "allocation: wrong shape for n_relays";
  auto frac_ok = [](double v) { return v >= 0.0 && v <= 1.0 + kTol && std::isfinite(v); };
  for (double v : a.alpha_src_own)
    if (!frac_ok(v)) return "allocation: alpha_src_own outside [0,1]";
  for (int l = 1; l <= n; ++l) {
    if (static_cast<int>(a.alpha_src_support[l - 1].size()) != l)
      return "allocation: alpha_src_support shape";
    if (static_cast<int>(a.alpha_relay[l - 1].size()) != n - l + 1)
      return "allocation: alpha_relay shape";
    for (int lp = l; lp <= n; ++lp)
      if (static_cast<int>(a.alpha_relay[l - 1][lp - l].size()) != l)
        return "allocation: alpha_relay shape";
    if (static_cast<int>(a.beta[l - 1].size()) != n - l + 1) return "allocation: beta shape";
    if (static_cast<int>(a.quant_noise[l - 1].size()) != n - l + 1)
      return "allocation: quant_noise shape";
    for (double v : a.alpha_src_support[l - 1])
      if (!frac_ok(v)) return "allocation: alpha_src_support outside [0,1]";
    for (const auto& row : a.alpha_relay[l - 1])
      for (double v : row)
        if (!frac_ok(v)) return "allocation: alpha_relay outside [0,1]";
    for (double v : a.beta[l - 1])
      if (!frac_ok(v)) return "allocation: beta outside [0,1]";
    for (double v : a.quant_noise[l - 1])
      if (!(v >= 0.0) || !std::isfinite(v)) return "allocation: quant_noise must be >= 0";
  }
  if (a.source_budget_used() > 1.0 + kTol) {
    err << "allocation: source budget " << a.source_budget_used() << " exceeds 1";
    return err.str();
  }
  for (int l = 1; l <= n; ++l)
    if (a.relay_budget_used(l) > 1.0 + kTol) {
      err << "allocation: relay level " << l << " budget " << a.relay_budget_used(l)
          << " exceeds 1";
      return err.str();
    }
  if (!coherent) {
    for (int l = 1; l <= n; ++l)
      for (int k = 1; k <= l; ++k)
        if (a.src_support(l, k) != 0.0)
          return "allocation: source support power requires coherent mode";
    for (int j = 1; j <= n; ++j)
      for (int l = j + 1; l <= n; ++l)
        for (int k = 1; k <= j; ++k)
          if (a.relay(j, l, k) != 0.0)
            return "allocation: cross-relay support power requires coherent mode";
  }
  return {};
}

}  // namespace relaynet
