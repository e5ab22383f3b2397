#include "relaynet/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace relaynet {

namespace {
constexpr double kNormTol = 1e-12;

std::vector<int> positions_of(const JointPmf& pmf, const std::vector<std::string>& vars) {
  std::vector<int> out;
  out.reserve(vars.size());
  for (const auto& v : vars) {
    const int i = pmf.index_of(v);
    if (i < 0) throw std::invalid_argument("pmf: unknown variable '" + v + "'");
    out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw std::invalid_argument("pmf: duplicate variable in set");
  return out;
}

void require_disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  for (int x : a)
    if (std::binary_search(b.begin(), b.end(), x))
      throw std::invalid_argument("pmf: variable sets must be disjoint");
}

// Flat index of the projection of entry e onto the given positions.
std::int64_t project_index(const JointPmf& pmf, std::int64_t e, const std::vector<int>& pos) {
  std::int64_t idx = 0;
  for (int p : pos) idx = idx * pmf.alphabet_sizes()[p] + pmf.value_at(e, p);
  return idx;
}

std::vector<double> marginal_table(const JointPmf& pmf, const std::vector<int>& pos) {
  std::int64_t n = 1;
  for (int p : pos) n *= pmf.alphabet_sizes()[p];
  std::vector<double> t(static_cast<size_t>(n), 0.0);
  for (std::int64_t e = 0; e < pmf.size(); ++e) t[project_index(pmf, e, pos)] += pmf.probs()[e];
  return t;
}

}  // namespace

JointPmf::JointPmf(std::vector<std::string> names, std::vector<int> alphabet_sizes,
                   std::vector<double> probs)
    : names_(std::move(names)), sizes_(std::move(alphabet_sizes)), probs_(std::move(probs)) {
  if (names_.size() != sizes_.size())
    throw std::invalid_argument("pmf: one alphabet size per variable required");
  std::int64_t n = 1;
  for (int s : sizes_) {
    if (s < 1) throw std::invalid_argument("pmf: alphabet sizes must be >= 1");
    if (n > kMaxEntries / s)
      throw std::invalid_argument("pmf: product alphabet exceeds the supported table size");
    n *= s;
  }
  if (static_cast<std::int64_t>(probs_.size()) != n)
    throw std::invalid_argument("pmf: probability table has wrong size");
  long double sum = 0.0L;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw std::invalid_argument("pmf: probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(static_cast<double>(sum) - 1.0) > kNormTol)
    throw std::invalid_argument("pmf: probabilities must sum to 1");
  for (const auto& nm : names_)
    if (std::count(names_.begin(), names_.end(), nm) != 1)
      throw std::invalid_argument("pmf: duplicate variable name '" + nm + "'");
  strides_.assign(names_.size(), 1);
  for (int i = static_cast<int>(names_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * sizes_[i + 1];
}

int JointPmf::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

JointPmf JointPmf::marginal(const std::vector<int>& keep) const {
  std::vector<std::string> names;
  std::vector<int> sizes;
  for (int p : keep) {
    names.push_back(names_[p]);
    sizes.push_back(sizes_[p]);
  }
  std::vector<double> t = marginal_table(*this, keep);
  long double sum = 0.0L;
  for (double v : t) sum += v;
  if (sum > 0.0L)
    for (auto& v : t) v = static_cast<double>(v / sum);
  return JointPmf(std::move(names), std::move(sizes), std::move(t));
}

double entropy(const JointPmf& pmf, const std::vector<std::string>& vars) {
  if (vars.empty()) return 0.0;
  const auto pos = positions_of(pmf, vars);
  const auto t = marginal_table(pmf, pos);
  long double h = 0.0L;
  for (double p : t)
    if (p > 0.0) h -= static_cast<long double>(p) * std::log2(static_cast<long double>(p));
  return static_cast<double>(h);
}

double cond_mutual_info(const JointPmf& pmf, const std::vector<std::string>& x,
                        const std::vector<std::string>& y, const std::vector<std::string>& z) {
  const auto px = positions_of(pmf, x);
  const auto py = positions_of(pmf, y);
  const auto pz = positions_of(pmf, z);
  require_disjoint(px, py);
  require_disjoint(px, pz);
  require_disjoint(py, pz);
  if (px.empty() || py.empty()) return 0.0;

  auto join = [](std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
  };
  const auto pxz = join(px, pz);
  const auto pyz = join(py, pz);
  const auto pxyz = join(pxz, py);
  const auto t_xz = marginal_table(pmf, pxz);
  const auto t_yz = marginal_table(pmf, pyz);
  const auto t_z = pz.empty() ? std::vector<double>{1.0} : marginal_table(pmf, pz);
  const auto t_xyz = marginal_table(pmf, pxyz);

  long double mi = 0.0L;
  {
    std::int64_t n = 1;
    for (int p : pxyz) n *= pmf.alphabet_sizes()[p];
    // index decomposition helpers for the xyz table
    std::vector<int> sz;
    for (int p : pxyz) sz.push_back(pmf.alphabet_sizes()[p]);
    std::vector<std::int64_t> stride(sz.size(), 1);
    for (int i = static_cast<int>(sz.size()) - 2; i >= 0; --i)
      stride[i] = stride[i + 1] * sz[i + 1];
    auto sub_index = [&](std::int64_t e, const std::vector<int>& pos) {
      std::int64_t idx = 0;
      for (int p : pos) {
        // position of p inside pxyz
        const auto it = std::lower_bound(pxyz.begin(), pxyz.end(), p);
        const int slot = static_cast<int>(it - pxyz.begin());
        idx = idx * sz[slot] + int((e / stride[slot]) % sz[slot]);
      }
      return idx;
    };
    for (std::int64_t e = 0; e < n; ++e) {
      const double pxyz_v = t_xyz[e];
      if (pxyz_v <= 0.0) continue;
      const double num = pxyz_v * (pz.empty() ? 1.0 : t_z[sub_index(e, pz)]);
      const double den = t_xz[sub_index(e, pxz)] * t_yz[sub_index(e, pyz)];
      mi += static_cast<long double>(pxyz_v) *
            std::log2(static_cast<long double>(num) / static_cast<long double>(den));
    }
  }
  double out = static_cast<double>(mi);
  if (out < 0.0 && out > -1e-12) out = 0.0;
  return out;
}

MarkovCheck verify_markov(const JointPmf& pmf, const std::vector<std::string>& a,
                          const std::vector<std::string>& b, const std::vector<std::string>& c,
                          double tol) {
  MarkovCheck out;
  out.deviation = cond_mutual_info(pmf, a, c, b);
  out.holds = out.deviation < tol;
  return out;
}

MiIdentityGaps mi_identity_gaps(const JointPmf& pmf) {
  const std::vector<std::string> X{"X"}, Y{"Y"}, U{"U"}, W{"W"}, YW{"Y", "W"}, WU{"W", "U"};
  MiIdentityGaps out;
  const double i_xyw_u = cond_mutual_info(pmf, X, YW, U);
  const double i_xy_wu = cond_mutual_info(pmf, X, Y, WU);
  const double i_xw_u = cond_mutual_info(pmf, X, W, U);
  out.markov_gap = std::abs(i_xyw_u - i_xy_wu);
  out.chain_residual = std::abs(i_xw_u + i_xy_wu - i_xyw_u);
  return out;
}

JointPmf parse_pmf(std::istream& in) {
  std::vector<std::string> names;
  std::vector<int> sizes;
  std::vector<std::pair<std::map<std::string, int>, double>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "var") {
      std::string name;
      int size = 0;
      if (!(ls >> name >> size) || size < 1)
        throw std::invalid_argument("pmf: bad var line " + std::to_string(lineno));
      names.push_back(name);
      sizes.push_back(size);
    } else if (tok == "p") {
      std::map<std::string, int> assign;
      std::vector<std::string> parts;
      std::string part;
      while (ls >> part) parts.push_back(part);
      if (parts.empty()) throw std::invalid_argument("pmf: empty p line");
      const double prob = std::stod(parts.back());
      parts.pop_back();
      for (const auto& p : parts) {
        const auto eq = p.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("pmf: expected name=value on line " +
                                      std::to_string(lineno));
        assign[p.substr(0, eq)] = std::stoi(p.substr(eq + 1));
      }
      entries.emplace_back(std::move(assign), prob);
    } else {
      throw std::invalid_argument("pmf: unknown directive '" + tok + "' on line " +
                                  std::to_string(lineno));
    }
  }
  std::int64_t n = 1;
  for (int s : sizes) {
    if (n > JointPmf::kMaxEntries / s)
      throw std::invalid_argument("pmf: product alphabet exceeds the supported table size");
    n *= s;
  }
  std::vector<double> probs(static_cast<size_t>(n), 0.0);
  std::vector<std::int64_t> strides(names.size(), 1);
  for (int i = static_cast<int>(names.size()) - 2; i >= 0; --i)
    strides[i] = strides[i + 1] * sizes[i + 1];
  for (const auto& [assign, prob] : entries) {
    if (assign.size() != names.size())
      throw std::invalid_argument("pmf: every p line must assign every variable");
    std::int64_t idx = 0;
    for (size_t i = 0; i < names.size(); ++i) {
      const auto it = assign.find(names[i]);
      if (it == assign.end())
        throw std::invalid_argument("pmf: entry missing variable '" + names[i] + "'");
      if (it->second < 0 || it->second >= sizes[i])
        throw std::invalid_argument("pmf: value out of alphabet for '" + names[i] + "'");
      idx += strides[i] * it->second;
    }
    probs[idx] += prob;
  }
  return JointPmf(std::move(names), std::move(sizes), std::move(probs));
}

JointPmf parse_pmf_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("pmf: cannot open '" + path + "'");
  return parse_pmf(f);
}

void write_pmf(std::ostream& out, const JointPmf& pmf) {
  for (int i = 0; i < pmf.n_vars(); ++i)
    out << "var " << pmf.names()[i] << " " << pmf.alphabet_sizes()[i] << "\n";
  out.precision(17);
  for (std::int64_t e = 0; e < pmf.size(); ++e) {
    if (pmf.probs()[e] == 0.0) continue;
    out << "p";
    for (int v = 0; v < pmf.n_vars(); ++v)
      out << " " << pmf.names()[v] << "=" << pmf.value_at(e, v);
    out << " " << pmf.probs()[e] << "\n";
  }
}

}  // namespace relaynet
