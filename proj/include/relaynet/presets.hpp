#pragma once

#include <string>
#include <vector>

#include "relaynet/allocation.hpp"

namespace relaynet {

// One scalar inside a PowerAllocation.
struct ParamRef {
  enum Kind { SrcOwn, SrcSupport, Relay, Beta, QuantNoise } kind;
  int a = 0, b = 0, c = 0;  // SrcOwn: k; SrcSupport: l,k; Relay: j,l,k; Beta/QuantNoise: l,m

  double get(const PowerAllocation& p) const;
  void set(PowerAllocation& p, double v) const;
  std::string name() const;
  bool operator==(const ParamRef& o) const {
    return kind == o.kind && a == o.a && b == o.b && c == o.c;
  }
};

std::vector<ParamRef> all_params(int n_relays);

// Restriction of the full parameter space. free_params and fixed_zero
// partition all_params(N); quantization noises of quantizing presets sit in
// free_params but are solved in closed form, not searched.
struct ProtocolPreset {
  std::string name;
  int n_relays = 0;
  bool uses_quantization = false;
  std::vector<ParamRef> free_params;
  std::vector<ParamRef> fixed_zero;

  /// Free parameters the optimizer actually searches (no quantization noises).
  std::vector<ParamRef> search_params() const;
};

/// name in {one_hop, df, cf, pdf, mixed_cf_df, full_mixed};
/// mixed_cf_df requires n_relays == 2.
ProtocolPreset preset(const std::string& name, int n_relays, bool coherent);

const std::vector<std::string>& preset_names();

/// Clamp fractions, zero everything outside the preset, renormalize any
/// over-unit per-node budget. Quantization noises are left untouched.
void project_allocation(const ProtocolPreset& p, PowerAllocation& a);

}  // namespace relaynet
