#include "relaynet/presets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relaynet {

double ParamRef::get(const PowerAllocation& p) const {
  switch (kind) {
    case SrcOwn:
      return p.src_own(a);
    case SrcSupport:
      return p.src_support(a, b);
    case Relay:
      return p.relay(a, b, c);
    case Beta:
      return p.bcast(a, b);
    case QuantNoise:
      return p.noise(a, b);
  }
  return 0.0;
}

void ParamRef::set(PowerAllocation& p, double v) const {
  switch (kind) {
    case SrcOwn:
      p.src_own(a) = v;
      break;
    case SrcSupport:
      p.src_support(a, b) = v;
      break;
    case Relay:
      p.relay(a, b, c) = v;
      break;
    case Beta:
      p.bcast(a, b) = v;
      break;
    case QuantNoise:
      p.noise(a, b) = v;
      break;
  }
}

std::string ParamRef::name() const {
  switch (kind) {
    case SrcOwn:
      return "alpha_own[" + std::to_string(a) + "]";
    case SrcSupport:
      return "alpha_src[" + std::to_string(a) + "," + std::to_string(b) + "]";
    case Relay:
      return "alpha_relay[" + std::to_string(a) + "," + std::to_string(b) + "," +
             std::to_string(c) + "]";
    case Beta:
      return "beta[" + std::to_string(a) + "," + std::to_string(b) + "]";
    case QuantNoise:
      return "nq[" + std::to_string(a) + "," + std::to_string(b) + "]";
  }
  return {};
}

std::vector<ParamRef> all_params(int n) {
  std::vector<ParamRef> out;
  for (int k = 1; k <= n + 1; ++k) out.push_back({ParamRef::SrcOwn, k, 0, 0});
  for (int l = 1; l <= n; ++l)
    for (int k = 1; k <= l; ++k) out.push_back({ParamRef::SrcSupport, l, k, 0});
  for (int j = 1; j <= n; ++j)
    for (int l = j; l <= n; ++l)
      for (int k = 1; k <= j; ++k) out.push_back({ParamRef::Relay, j, l, k});
  for (int l = 1; l <= n; ++l)
    for (int m = 1; m <= n - l + 1; ++m) out.push_back({ParamRef::Beta, l, m});
  for (int l = 1; l <= n; ++l)
    for (int m = 1; m <= n - l + 1; ++m) out.push_back({ParamRef::QuantNoise, l, m});
  return out;
}

std::vector<ParamRef> ProtocolPreset::search_params() const {
  std::vector<ParamRef> out;
  for (const auto& p : free_params)
    if (p.kind != ParamRef::QuantNoise) out.push_back(p);
  return out;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"one_hop", "df",          "cf",
                                                 "pdf",     "mixed_cf_df", "full_mixed"};
  return names;
}

ProtocolPreset preset(const std::string& name, int n, bool coherent) {
  if (n < 0) throw std::invalid_argument("preset: n_relays must be >= 0");
  ProtocolPreset out;
  out.name = name;
  out.n_relays = n;
  auto add = [&](ParamRef::Kind kind, int a, int b = 0, int c = 0) {
    out.free_params.push_back({kind, a, b, c});
  };
  auto add_all_quant = [&] {
    for (int l = 1; l <= n; ++l)
      for (int m = 1; m <= n - l + 1; ++m) add(ParamRef::QuantNoise, l, m);
    out.uses_quantization = true;
  };
  if (name == "one_hop") {
    add(ParamRef::SrcOwn, n + 1);
  } else if (name == "df") {
    // Single message layer decoded by every level.
    add(ParamRef::SrcOwn, 1);
    for (int l = 1; l <= n && coherent; ++l) add(ParamRef::SrcSupport, l, 1);
    for (int j = 1; j <= n; ++j)
      for (int l = j; l <= n; ++l)
        if (coherent || l == j) add(ParamRef::Relay, j, l, 1);
  } else if (name == "cf") {
    // Relays convey quantizations only; the source sends the top layer.
    add(ParamRef::SrcOwn, n + 1);
    for (int l = 1; l <= n; ++l)
      for (int m = 1; m <= n - l + 1; ++m) add(ParamRef::Beta, l, m);
    add_all_quant();
  } else if (name == "pdf") {
    // Layered decoding without any quantization broadcast.
    for (int k = 1; k <= n + 1; ++k) add(ParamRef::SrcOwn, k);
    if (coherent)
      for (int l = 1; l <= n; ++l)
        for (int k = 1; k <= l; ++k) add(ParamRef::SrcSupport, l, k);
    for (int j = 1; j <= n; ++j)
      for (int l = j; l <= n; ++l)
        if (coherent || l == j)
          for (int k = 1; k <= j; ++k) add(ParamRef::Relay, j, l, k);
  } else if (name == "mixed_cf_df") {
    if (n != 2) throw std::invalid_argument("preset: mixed_cf_df requires exactly two relays");
    // Level 1 quantizes only; level 2 decodes one layer and retransmits it.
    add(ParamRef::SrcOwn, 2);
    add(ParamRef::SrcOwn, 3);
    if (coherent) add(ParamRef::SrcSupport, 2, 2);
    add(ParamRef::Relay, 2, 2, 2);
    add(ParamRef::Beta, 1, 1);
    add(ParamRef::Beta, 1, 2);
    for (int m = 1; m <= 2; ++m) out.free_params.push_back({ParamRef::QuantNoise, 1, m});
    out.uses_quantization = true;
  } else if (name == "full_mixed") {
    for (int k = 1; k <= n + 1; ++k) add(ParamRef::SrcOwn, k);
    if (coherent)
      for (int l = 1; l <= n; ++l)
        for (int k = 1; k <= l; ++k) add(ParamRef::SrcSupport, l, k);
    for (int j = 1; j <= n; ++j)
      for (int l = j; l <= n; ++l)
        if (coherent || l == j)
          for (int k = 1; k <= j; ++k) add(ParamRef::Relay, j, l, k);
    for (int l = 1; l <= n; ++l)
      for (int m = 1; m <= n - l + 1; ++m) add(ParamRef::Beta, l, m);
    add_all_quant();
  } else {
    throw std::invalid_argument("preset: unknown name '" + name + "'");
  }
  for (const auto& p : all_params(n)) {
    if (std::find(out.free_params.begin(), out.free_params.end(), p) == out.free_params.end())
      out.fixed_zero.push_back(p);
  }
  return out;
}

void project_allocation(const ProtocolPreset& p, PowerAllocation& a) {
  for (const auto& z : p.fixed_zero) z.set(a, 0.0);
  for (const auto& f : p.free_params) {
    if (f.kind == ParamRef::QuantNoise) continue;
    double v = f.get(a);
    if (!std::isfinite(v)) v = 0.0;
    f.set(a, std::clamp(v, 0.0, 1.0));
  }
  const double src = a.source_budget_used();
  if (src > 1.0) {
    const double s = 1.0 / src;
    for (auto& v : a.alpha_src_own) v *= s;
    for (auto& row : a.alpha_src_support)
      for (auto& v : row) v *= s;
  }
  for (int l = 1; l <= a.n_relays; ++l) {
    const double used = a.relay_budget_used(l);
    if (used > 1.0) {
      const double s = 1.0 / used;
      for (auto& row : a.alpha_relay[l - 1])
        for (auto& v : row) v *= s;
      for (auto& v : a.beta[l - 1]) v *= s;
    }
  }
}

}  // namespace relaynet
