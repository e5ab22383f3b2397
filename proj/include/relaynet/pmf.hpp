#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace relaynet {

// Finite joint probability table over named variables. Entry order is
// row-major with the first declared variable slowest.
class JointPmf {
 public:
  JointPmf() = default;
  JointPmf(std::vector<std::string> names, std::vector<int> alphabet_sizes,
           std::vector<double> probs);

  static constexpr std::int64_t kMaxEntries = 10'000'000;

  int n_vars() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<int>& alphabet_sizes() const { return sizes_; }
  const std::vector<double>& probs() const { return probs_; }
  std::int64_t size() const { return static_cast<std::int64_t>(probs_.size()); }

  int index_of(const std::string& name) const;  // -1 when absent
  bool has(const std::string& name) const { return index_of(name) >= 0; }

  /// Value of variable v (by position) inside flat entry e.
  int value_at(std::int64_t e, int v) const { return int((e / strides_[v]) % sizes_[v]); }

  /// Marginal over a subset of variable positions (re-normalizes exactly).
  JointPmf marginal(const std::vector<int>& keep) const;

 private:
  std::vector<std::string> names_;
  std::vector<int> sizes_;
  std::vector<std::int64_t> strides_;
  std::vector<double> probs_;
};

/// H(subset) in bits; empty subset gives 0.
double entropy(const JointPmf& pmf, const std::vector<std::string>& vars);

/// I(X;Y|Z) in bits via the direct p log p/q sum. X, Y, Z must be disjoint.
double cond_mutual_info(const JointPmf& pmf, const std::vector<std::string>& x,
                        const std::vector<std::string>& y, const std::vector<std::string>& z);

struct MarkovCheck {
  bool holds = false;
  double deviation = 0.0;  // I(A;C|B) in bits
};

/// A-B-C chain test: I(A;C|B) below tol.
MarkovCheck verify_markov(const JointPmf& pmf, const std::vector<std::string>& a,
                          const std::vector<std::string>& b, const std::vector<std::string>& c,
                          double tol = 1e-10);

struct MiIdentityGaps {
  double markov_gap = 0.0;   // |I(X;Y,W|U) - I(X;Y|W,U)|, equals I(X;W|U)
  double chain_residual = 0.0;  // |I(X;W|U) + I(X;Y|W,U) - I(X;Y,W|U)|
};

/// Chain-rule decomposition of I(X; Y,W | U) over variables named X, Y, U, W.
MiIdentityGaps mi_identity_gaps(const JointPmf& pmf);

JointPmf parse_pmf(std::istream& in);
JointPmf parse_pmf_file(const std::string& path);
void write_pmf(std::ostream& out, const JointPmf& pmf);

}  // namespace relaynet
