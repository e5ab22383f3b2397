#include "relaynet/gaussian_oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "relaynet/rates.hpp"
#include "relaynet/mi_terms.hpp"

namespace relaynet {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double log_det_spd(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("gaussian oracle: covariance decomposition failed");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double d = ldlt.vectorD()(i);
    if (!(d > 0.0)) throw std::runtime_error("gaussian oracle: covariance block is singular");
    acc += std::log(d);
  }
  return acc;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& cov, const std::vector<int>& rows,
                          const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = cov(rows[i], cols[j]);
  return out;
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void check_disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  for (int i : a)
    for (int j : b)
      if (i == j) throw std::invalid_argument("gaussian oracle: index sets must be disjoint");
}

// Gaussian log density of residuals r = x - mean, with precomputed inverse.
struct CondDensity {
  Eigen::MatrixXd regression;  // x_dim x given_dim
  Eigen::MatrixXd residual_cov_inv;
  double log_norm = 0.0;

  static CondDensity fit(const Eigen::MatrixXd& cov, const std::vector<int>& x,
                         const std::vector<int>& given) {
    CondDensity d;
    const Eigen::MatrixXd kxx = submatrix(cov, x, x);
    if (given.empty()) {
      d.regression = Eigen::MatrixXd::Zero(x.size(), 0);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(kxx);
      d.residual_cov_inv = ldlt.solve(Eigen::MatrixXd::Identity(x.size(), x.size()));
      d.log_norm = -0.5 * (x.size() * std::log(2.0 * M_PI) + log_det_spd(kxx));
      return d;
    }
    const Eigen::MatrixXd kgg = submatrix(cov, given, given);
    const Eigen::MatrixXd kxg = submatrix(cov, x, given);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(kgg);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("gaussian oracle: conditioning block not positive definite");
    d.regression = ldlt.solve(kxg.transpose()).transpose();
    Eigen::MatrixXd resid = kxx - d.regression * kxg.transpose();
    resid = 0.5 * (resid + resid.transpose());
    Eigen::LDLT<Eigen::MatrixXd> lr(resid);
    d.residual_cov_inv = lr.solve(Eigen::MatrixXd::Identity(x.size(), x.size()));
    d.log_norm = -0.5 * (x.size() * std::log(2.0 * M_PI) + log_det_spd(resid));
    return d;
  }
};

// Mean and standard error of the per-sample log density ratio, in bits and
// doubled for the complex-channel convention.
McEstimate density_ratio_estimate(const CondDensity& full, const CondDensity& base,
                                  const Eigen::MatrixXd& vx, const Eigen::MatrixXd& vyz,
                                  const Eigen::MatrixXd& vz) {
  const Eigen::MatrixXd r1 = vx - full.regression * vyz;
  const Eigen::MatrixXd r2 = vx - base.regression * vz;
  const Eigen::ArrayXd q1 = (r1.array() * (full.residual_cov_inv * r1).array()).colwise().sum();
  const Eigen::ArrayXd q2 = (r2.array() * (base.residual_cov_inv * r2).array()).colwise().sum();
  const Eigen::ArrayXd w = ((full.log_norm - base.log_norm) - 0.5 * (q1 - q2)) / kLn2;
  const int samples = static_cast<int>(w.size());
  const double mean = w.mean();
  const double var = std::max(0.0, (w - mean).square().sum() / (samples - 1.0)) / samples;
  return {2.0 * mean, 2.0 * std::sqrt(var)};
}

}  // namespace

double gaussian_cond_mi_bits(const Eigen::MatrixXd& cov, const std::vector<int>& x,
                             const std::vector<int>& y, const std::vector<int>& z) {
  check_disjoint(x, y);
  check_disjoint(x, z);
  check_disjoint(y, z);
  if (x.empty() || y.empty()) return 0.0;
  const double ld_xz = log_det_spd(submatrix(cov, concat(x, z), concat(x, z)));
  const double ld_yz = log_det_spd(submatrix(cov, concat(y, z), concat(y, z)));
  const auto xyz = concat(concat(x, y), z);
  const double ld_xyz = log_det_spd(submatrix(cov, xyz, xyz));
  const double ld_z = log_det_spd(submatrix(cov, z, z));
  return (ld_xz + ld_yz - ld_xyz - ld_z) / kLn2;
}

McEstimate gaussian_mi_mc(const Eigen::MatrixXd& cov, const std::vector<int>& x,
                          const std::vector<int>& y, const std::vector<int>& z, int samples,
                          std::uint64_t seed) {
  check_disjoint(x, y);
  check_disjoint(x, z);
  check_disjoint(y, z);
  if (cov.rows() != cov.cols()) throw std::invalid_argument("gaussian_mi_mc: square matrix required");
  if (samples < 10000) throw std::invalid_argument("gaussian_mi_mc: need at least 10000 samples");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, cov.trace()))
    throw std::invalid_argument("gaussian_mi_mc: covariance is not PSD");
  // per-variable rescaling leaves every mutual information unchanged
  Eigen::VectorXd scale = cov.diagonal().cwiseMax(1e-300).cwiseSqrt();
  const Eigen::MatrixXd scaled =
      scale.cwiseInverse().asDiagonal() * cov * scale.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(scaled);
  const Eigen::MatrixXd root =
      es2.eigenvectors() * es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int dim = static_cast<int>(cov.rows());
  Eigen::MatrixXd draws(dim, samples);
  for (int s = 0; s < samples; ++s)
    for (int i = 0; i < dim; ++i) draws(i, s) = gauss(rng);
  const Eigen::MatrixXd v = root * draws;

  const auto yz = concat(y, z);
  const CondDensity full = CondDensity::fit(scaled, x, yz);
  const CondDensity base = CondDensity::fit(scaled, x, z);
  Eigen::MatrixXd vx(x.size(), samples), vyz(yz.size(), samples), vz(z.size(), samples);
  for (size_t i = 0; i < x.size(); ++i) vx.row(static_cast<int>(i)) = v.row(x[i]);
  for (size_t i = 0; i < yz.size(); ++i) vyz.row(static_cast<int>(i)) = v.row(yz[i]);
  for (size_t i = 0; i < z.size(); ++i) vz.row(static_cast<int>(i)) = v.row(z[i]);
  return density_ratio_estimate(full, base, vx, vyz, vz);
}

GaussianNetworkModel::GaussianNetworkModel(const Topology& topo, const Ordering& ordering,
                                           const PowerAllocation& alloc) {
  const int n = topo.n_relays;
  RateContext ctx(topo, ordering);
  ctx.load(alloc);

  struct Latent {
    std::string name;
    double var;
  };
  std::vector<Latent> latents;
  // message latents are unit variance; coefficients carry the powers
  for (int k = 1; k <= n + 1; ++k) latents.push_back({var_U(k), 1.0});
  for (int l = 1; l <= n; ++l)
    for (int k = 1; k <= l; ++k) latents.push_back({var_V(l, k), 1.0});
  for (int l = 1; l <= n; ++l)
    for (int m = 1; m <= ordering.refinements(l); ++m) latents.push_back({var_W(l, m), 1.0});
  for (int r = 1; r <= n + 1; ++r) latents.push_back({"Z" + std::to_string(r), ctx.noise(r)});
  for (int l = 1; l <= n; ++l)
    for (int m = 1; m <= ordering.refinements(l); ++m)
      latents.push_back({"Zq" + std::to_string(l) + "_" + std::to_string(m), alloc.noise(l, m)});

  auto latent_index = [&](const std::string& nm) {
    for (size_t i = 0; i < latents.size(); ++i)
      if (latents[i].name == nm) return static_cast<int>(i);
    throw std::logic_error("gaussian oracle: unknown latent " + nm);
  };

  const int nl = static_cast<int>(latents.size());
  latent_var_.resize(nl);
  for (int i = 0; i < nl; ++i) latent_var_(i) = latents[i].var;

  // channel output coefficients at receiver r, excluding r's own transmissions
  auto y_row = [&](int r) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nl);
    for (int k = 1; k <= n + 1; ++k)
      row(latent_index(var_U(k))) = ctx.h(0, r) * std::sqrt(alloc.src_own(k) * ctx.power(0));
    for (int lv = 1; lv <= n; ++lv)
      for (int k = 1; k <= lv; ++k) {
        double a = ctx.h(0, r) * std::sqrt(alloc.src_support(lv, k) * ctx.power(0));
        for (int j = k; j <= lv; ++j) {
          if (j == r) continue;
          a += ctx.h(j, r) * std::sqrt(alloc.relay(j, lv, k) * ctx.power(j));
        }
        row(latent_index(var_V(lv, k))) = a;
      }
    for (int l = 1; l <= n; ++l) {
      if (l == r) continue;
      for (int m = 1; m <= ordering.refinements(l); ++m)
        row(latent_index(var_W(l, m))) = ctx.h(l, r) * std::sqrt(alloc.bcast(l, m) * ctx.power(l));
    }
    row(latent_index("Z" + std::to_string(r))) = 1.0;
    return row;
  };

  std::vector<Eigen::RowVectorXd> rows;
  auto add_obs = [&](const std::string& nm, const Eigen::RowVectorXd& row) {
    obs_names_.push_back(nm);
    rows.push_back(row);
  };
  for (int k = 1; k <= n + 1; ++k) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nl);
    row(latent_index(var_U(k))) = 1.0;
    add_obs(var_U(k), row);
  }
  for (int l = 1; l <= n; ++l)
    for (int k = 1; k <= l; ++k) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nl);
      row(latent_index(var_V(l, k))) = 1.0;
      add_obs(var_V(l, k), row);
    }
  for (int l = 1; l <= n; ++l)
    for (int m = 1; m <= ordering.refinements(l); ++m) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nl);
      row(latent_index(var_W(l, m))) = 1.0;
      add_obs(var_W(l, m), row);
    }
  for (int r = 1; r <= n + 1; ++r) add_obs(var_Y(r), y_row(r));
  // quantizations: the channel output minus what the quantizing level knew
  // when building them, plus the refinement noise tail
  for (int l = 1; l <= n; ++l) {
    Eigen::RowVectorXd base = y_row(l);
    for (int k = 1; k <= l; ++k) base(latent_index(var_U(k))) = 0.0;
    for (int lv = 1; lv <= n; ++lv)
      for (int k = 1; k <= std::min(l, lv); ++k) base(latent_index(var_V(lv, k))) = 0.0;
    for (int i = 1; i <= l; ++i)
      if (i != l) base(latent_index(var_W(i, 1))) = 0.0;
    for (int m = 1; m <= ordering.refinements(l); ++m) {
      Eigen::RowVectorXd row = base;
      for (int i = m; i <= ordering.refinements(l); ++i)
        row(latent_index("Zq" + std::to_string(l) + "_" + std::to_string(i))) = 1.0;
      add_obs(var_Yh(l, m), row);
    }
  }
  coef_.resize(static_cast<int>(rows.size()), nl);
  for (size_t i = 0; i < rows.size(); ++i) coef_.row(static_cast<int>(i)) = rows[i];
}

int GaussianNetworkModel::row_of(const std::string& name) const {
  for (size_t i = 0; i < obs_names_.size(); ++i)
    if (obs_names_[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("gaussian oracle: unknown observable '" + name + "'");
}

bool GaussianNetworkModel::has(const std::string& name) const {
  for (const auto& nm : obs_names_)
    if (nm == name) return true;
  return false;
}

Eigen::MatrixXd GaussianNetworkModel::covariance(const std::vector<std::string>& names) const {
  Eigen::MatrixXd sel(names.size(), coef_.cols());
  for (size_t i = 0; i < names.size(); ++i) sel.row(static_cast<int>(i)) = coef_.row(row_of(names[i]));
  return sel * latent_var_.asDiagonal() * sel.transpose();
}

double GaussianNetworkModel::cond_mi_bits(const std::vector<std::string>& x,
                                          const std::vector<std::string>& y,
                                          const std::vector<std::string>& z) const {
  std::vector<std::string> all;
  std::vector<int> ix, iy, iz;
  for (const auto& v : x) {
    ix.push_back(static_cast<int>(all.size()));
    all.push_back(v);
  }
  for (const auto& v : y) {
    iy.push_back(static_cast<int>(all.size()));
    all.push_back(v);
  }
  for (const auto& v : z) {
    iz.push_back(static_cast<int>(all.size()));
    all.push_back(v);
  }
  return gaussian_cond_mi_bits(covariance(all), ix, iy, iz);
}

std::vector<McEstimate> GaussianNetworkModel::cond_mi_mc_batch(const std::vector<MiTerm>& terms,
                                                               int samples,
                                                               std::uint64_t seed) const {
  if (samples < 100) throw std::invalid_argument("gaussian_mi_mc: need at least 100 samples");
  const int nl = static_cast<int>(latent_var_.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd latents(nl, samples);
  const Eigen::VectorXd sigma = latent_var_.cwiseSqrt();
  for (int s = 0; s < samples; ++s)
    for (int i = 0; i < nl; ++i) latents(i, s) = sigma(i) * gauss(rng);
  // observables come straight from the model, no factorization involved
  const Eigen::MatrixXd obs = coef_ * latents;
  const Eigen::VectorXd all_scale =
      (coef_ * latent_var_.asDiagonal() * coef_.transpose()).diagonal().cwiseMax(1e-300).cwiseSqrt();

  std::vector<McEstimate> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    std::vector<int> rows;
    std::vector<int> ix, iy, iz;
    auto push = [&](const std::vector<std::string>& names, std::vector<int>& idx) {
      for (const auto& nm : names) {
        idx.push_back(static_cast<int>(rows.size()));
        rows.push_back(row_of(nm));
      }
    };
    push(t.x, ix);
    push(t.y, iy);
    push(t.z, iz);
    const int nv = static_cast<int>(rows.size());
    Eigen::MatrixXd sel(nv, coef_.cols());
    Eigen::VectorXd scale(nv);
    for (int i = 0; i < nv; ++i) {
      scale(i) = all_scale(rows[i]);
      sel.row(i) = coef_.row(rows[i]) / scale(i);
    }
    const Eigen::MatrixXd cov = sel * latent_var_.asDiagonal() * sel.transpose();
    const auto yz = concat(iy, iz);
    const CondDensity full = CondDensity::fit(cov, ix, yz);
    const CondDensity base = CondDensity::fit(cov, ix, iz);
    Eigen::MatrixXd vx(ix.size(), samples), vyz(yz.size(), samples), vz(iz.size(), samples);
    for (size_t i = 0; i < ix.size(); ++i)
      vx.row(static_cast<int>(i)) = obs.row(rows[ix[i]]) / scale(ix[i]);
    for (size_t i = 0; i < yz.size(); ++i)
      vyz.row(static_cast<int>(i)) = obs.row(rows[yz[i]]) / scale(yz[i]);
    for (size_t i = 0; i < iz.size(); ++i)
      vz.row(static_cast<int>(i)) = obs.row(rows[iz[i]]) / scale(iz[i]);
    out.push_back(density_ratio_estimate(full, base, vx, vyz, vz));
  }
  return out;
}

McEstimate GaussianNetworkModel::cond_mi_mc(const std::vector<std::string>& x,
                                            const std::vector<std::string>& y,
                                            const std::vector<std::string>& z, int samples,
                                            std::uint64_t seed) const {
  std::vector<std::string> all;
  std::vector<int> ix, iy, iz;
  for (const auto& v : x) {
    ix.push_back(static_cast<int>(all.size()));
    all.push_back(v);
  }
  for (const auto& v : y) {
    iy.push_back(static_cast<int>(all.size()));
    all.push_back(v);
  }
  for (const auto& v : z) {
    iz.push_back(static_cast<int>(all.size()));
    all.push_back(v);
  }
  return gaussian_mi_mc(covariance(all), ix, iy, iz, samples, seed);
}

}  // namespace relaynet
