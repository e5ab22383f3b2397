#include "relaynet/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace relaynet {

namespace {

constexpr double kLog2e = 1.4426950408889634;  // 1/ln 2
constexpr double kSlackGuard = 1e-9;
constexpr double kRateFloor = 1e-9;  // bits below which a refinement conveys nothing

// Cofactor determinants for the sizes the rate formulas produce; LU beyond.
double det_small(const Eigen::MatrixXd& m) {
  switch (m.rows()) {
    case 0:
      return 1.0;
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return m.partialPivLu().determinant();
  }
}

// log2 of det(num)/det(den) with a fallback through eigenvalue products when
// the plain determinants underflow.
bool log2_det_ratio(const Eigen::MatrixXd& num, const Eigen::MatrixXd& den, double& out) {
  const double dn = det_small(num);
  const double dd = det_small(den);
  if (dd > 1e-300 && dn > 1e-300) {
    out = std::log2(dn / dd);
    return true;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> en(num, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(den, Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (int i = 0; i < num.rows(); ++i) {
    if (!(en.eigenvalues()(i) > 0.0) || !(ed.eigenvalues()(i) > 0.0)) return false;
    acc += std::log2(en.eigenvalues()(i)) - std::log2(ed.eigenvalues()(i));
  }
  out = acc;
  return true;
}

// Negative C() arguments are float cancellation if tiny, an error otherwise.
double guarded_ratio(double num, double den, double scale) {
  if (den <= 0.0) {
    if (std::abs(den) < 1e-9 * scale) return num > 0.0 ? INFINITY : 0.0;
    throw std::runtime_error("rates: negative interference denominator");
  }
  double x = num / den;
  if (x < 0.0) {
    if (std::abs(num) < 1e-9 * scale) return 0.0;
    throw std::runtime_error("rates: negative rate argument");
  }
  return x;
}

}  // namespace

double capacity_fn(double x) {
  if (!(x >= 0.0)) throw std::domain_error("capacity_fn: argument must be >= 0");
  return std::log1p(x) * kLog2e;
}

RateContext::RateContext(const Topology& topo, const Ordering& ordering)
    : n_(topo.n_relays), topo_(&topo), ord_(ordering) {
  if (ordering.n_relays() != n_)
    throw std::invalid_argument("rate context: ordering size does not match topology");
  const int nn = n_ + 2;
  gains_.assign(nn * nn, 0.0);
  powers_.assign(nn, 0.0);
  noises_.assign(nn, 0.0);
  for (int a = 0; a < nn; ++a) {
    const int na = ord_.node_of_level(a);
    if (a <= n_) powers_[a] = topo.tx_powers(na);
    if (a >= 1) noises_[a] = topo.noise_powers(na);
    for (int b = 0; b < nn; ++b) {
      if (a == b) continue;
      gains_[a * nn + b] = topo.gain_between(na, ord_.node_of_level(b));
    }
  }
  sqrt_own_.assign(n_ + 1, 0.0);
  sqrt_src_.resize(n_);
  sqrt_relay_.resize(n_);
  for (int l = 1; l <= n_; ++l) {
    sqrt_src_[l - 1].assign(l, 0.0);
    sqrt_relay_[l - 1].resize(n_ - l + 1);
    for (int lp = l; lp <= n_; ++lp) sqrt_relay_[l - 1][lp - l].assign(l, 0.0);
  }
}

void RateContext::load(const PowerAllocation& alloc) {
  if (alloc.n_relays != n_) throw std::invalid_argument("rate context: allocation size mismatch");
  alloc_ = &alloc;
  for (int k = 1; k <= n_ + 1; ++k) sqrt_own_[k - 1] = std::sqrt(alloc.src_own(k) * powers_[0]);
  for (int l = 1; l <= n_; ++l)
    for (int k = 1; k <= l; ++k)
      sqrt_src_[l - 1][k - 1] = std::sqrt(alloc.src_support(l, k) * powers_[0]);
  for (int j = 1; j <= n_; ++j)
    for (int l = j; l <= n_; ++l)
      for (int k = 1; k <= j; ++k)
        sqrt_relay_[j - 1][l - j][k - 1] = std::sqrt(alloc.relay(j, l, k) * powers_[j]);
  conveyed_.assign(n_, {});
  cum_rate_.assign(n_, {});
  for (int l = 1; l <= n_; ++l) {
    const int ml = ord_.refinements(l);
    conveyed_[l - 1].assign(ml, false);
    cum_rate_[l - 1].assign(ml, 0.0);
    double cum = 0.0;
    for (int m = 1; m <= ml; ++m) {
      if (alloc.bcast(l, m) > 0.0) cum += broadcast_rate_bound(*this, l, m).rate;
      cum_rate_[l - 1][m - 1] = cum;
      conveyed_[l - 1][m - 1] = cum > kRateFloor;
    }
  }
}

double RateContext::amplitude(int l, int k, int m) const {
  if (l < 1 || l > n_ || k < 1 || k > l || m < 1 || m > n_ + 1)
    throw std::out_of_range("rates: message or receiver index out of range");
  double a = h(0, m) * sqrt_src_[l - 1][k - 1];
  for (int j = k; j <= l; ++j) a += h(j, m) * sqrt_relay_[j - 1][l - j][k - 1];
  return a;
}

double RateContext::gamma_relay(int l, int k, int m) const {
  const double a = amplitude(l, k, m);
  return a * a;
}

double RateContext::gamma_source(int k, int m) const {
  if (k < 1 || k > n_ + 1 || m < 1 || m > n_ + 1)
    throw std::out_of_range("rates: message or receiver index out of range");
  const double g = h(0, m);
  return g * g * alloc_->src_own(k) * powers_[0];
}

double RateContext::lambda_relay(int l, int k, int m, int mp) const {
  if (m == mp)
    throw std::invalid_argument("rates: cross-power needs two distinct receivers");
  return amplitude(l, k, m) * amplitude(l, k, mp);
}

double RateContext::lambda_source(int k, int m, int mp) const {
  if (m == mp)
    throw std::invalid_argument("rates: cross-power needs two distinct receivers");
  if (k < 1 || k > n_ + 1 || m < 1 || m > n_ + 1 || mp < 1 || mp > n_ + 1)
    throw std::out_of_range("rates: message or receiver index out of range");
  return h(0, m) * h(0, mp) * alloc_->src_own(k) * powers_[0];
}

double RateContext::gamma_band(int m, int lo, int hi, int klo) const {
  double s = 0.0;
  for (int l = lo; l <= hi; ++l)
    for (int k = klo; k <= l; ++k) s += gamma_relay(l, k, m);
  return s;
}

double RateContext::lambda_band(int m, int mp, int lo, int hi, int klo) const {
  double s = 0.0;
  for (int l = lo; l <= hi; ++l)
    for (int k = klo; k <= l; ++k) s += lambda_relay(l, k, m, mp);
  return s;
}

double RateContext::gamma_range(int l, int klo, int khi, int m) const {
  double s = 0.0;
  for (int k = klo; k <= khi; ++k) s += gamma_relay(l, k, m);
  return s;
}

double RateContext::gamma_source_range(int klo, int khi, int m) const {
  double s = 0.0;
  for (int k = klo; k <= khi; ++k) s += gamma_source(k, m);
  return s;
}

double RateContext::lambda_source_range(int klo, int khi, int m, int mp) const {
  double s = 0.0;
  for (int k = klo; k <= khi; ++k) s += lambda_source(k, m, mp);
  return s;
}

double RateContext::residual_broadcast(int r, int k, int kp) const {
  double s = 0.0;
  for (int m = 1; m <= n_; ++m) {
    if (m == r) continue;
    double frac;
    if (m >= k && m <= kp) {
      if (m == kp) continue;  // fully decoded sender
      const int idx = ord_.refine_index(m, kp);
      frac = alloc_->beta_tail(m, idx + 1);
    } else {
      frac = alloc_->beta_tail(m, 1);
    }
    if (frac == 0.0) continue;
    const double g = h(m, r);
    s += g * g * frac * powers_[m];
  }
  return s;
}

std::vector<std::vector<bool>> conveyed_refinements(const RateContext& ctx) {
  return ctx.conveyed();
}

CovarianceAssembly covariance_matrix(const RateContext& ctx, int l, int j, int jp,
                                     bool validate) {
  const int n = ctx.n_relays();
  if (l < 1 || l > n + 1 || j < 1 || j > l || (jp != j - 1 && jp != j))
    throw std::out_of_range("covariance_matrix: bad indices");
  const auto& conveyed = ctx.conveyed();
  CovarianceAssembly out;
  out.row_levels.push_back(l);
  for (int i = 1; i <= j - 1; ++i) {
    const int ref = ctx.ordering().refine_index(i, l);
    if (ref >= 1 && conveyed[i - 1][ref - 1]) out.row_levels.push_back(i);
  }
  const int rows = static_cast<int>(out.row_levels.size());
  Eigen::MatrixXd K(rows, rows);
  for (int r = 0; r < rows; ++r) {
    const int a = out.row_levels[r];
    K(r, r) = ctx.gamma_band(a, l + 1, n, l + 1) + ctx.gamma_source_range(jp + 1, n + 1, a) +
              ctx.residual_broadcast(a, 1, l) + ctx.noise(a);
    if (r > 0) {
      const int ref = ctx.ordering().refine_index(a, l);
      K(r, r) += ctx.allocation().noise_tail(a, ref);
    }
    for (int c = r + 1; c < rows; ++c) {
      const int b = out.row_levels[c];
      K(r, c) = ctx.lambda_band(a, b, l + 1, n, l + 1) +
                ctx.lambda_source_range(jp + 1, n + 1, a, b);
      K(c, r) = K(r, c);
    }
  }
  out.matrix = std::move(K);
  if (validate) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix, Eigen::EigenvaluesOnly);
    const double floor = -1e-9 * out.matrix.trace();
    if (es.eigenvalues().minCoeff() < floor)
      throw std::runtime_error("covariance_matrix: assembled matrix is not PSD");
  }
  return out;
}

bool source_direct_mi(const RateContext& ctx, int k, int l, double& out) {
  const auto num = covariance_matrix(ctx, l, k, k - 1);
  const auto den = covariance_matrix(ctx, l, k, k);
  return log2_det_ratio(num.matrix, den.matrix, out);
}

double source_relay_mi(const RateContext& ctx, int k, int j, int l) {
  const int n = ctx.n_relays();
  const double sig = ctx.gamma_relay(j, k, l);
  const double den = ctx.gamma_band(l, 1, j - 1, 1) + ctx.gamma_range(j, k + 1, j, l) +
                     ctx.gamma_band(l, l + 1, n, l + 1) + ctx.residual_broadcast(l, j + 1, l) +
                     ctx.gamma_source_range(1, n + 1, l) + ctx.noise(l);
  return capacity_fn(guarded_ratio(sig, den, den + sig));
}

double broadcast_mi(const RateContext& ctx, int l, int j, int kk) {
  const int n = ctx.n_relays();
  const int kp = ctx.ordering().refine_target(l, kk);
  const double g = ctx.h(l, kp);
  const double sig = g * g * ctx.allocation().bcast(l, j) * ctx.power(l);
  double decoded = 0.0;
  for (int i = 1; i <= j; ++i) decoded += ctx.allocation().bcast(l, i);
  const double gross = ctx.gamma_band(kp, 1, l - 1, 1) + ctx.gamma_band(kp, kp + 1, n, kp + 1) +
                       ctx.residual_broadcast(kp, l + 1, kp) +
                       ctx.gamma_source_range(1, n + 1, kp) + ctx.noise(kp);
  const double den = gross - g * g * decoded * ctx.power(l);
  return capacity_fn(guarded_ratio(sig, den, gross));
}

namespace {

// Conditional variance of the quantized output given the rank-j side node.
double quant_conditional_variance(const RateContext& ctx, int l, int j) {
  const int n = ctx.n_relays();
  const int jp = ctx.ordering().refine_target(l, j);
  const double own = ctx.gamma_band(l, jp + 1, n, jp + 1) +
                     ctx.gamma_source_range(l + 1, n + 1, l) +
                     ctx.residual_broadcast(l, 1, jp) + ctx.noise(l);
  const double side = ctx.gamma_band(jp, jp + 1, n, jp + 1) +
                      ctx.gamma_source_range(l + 1, n + 1, jp) +
                      ctx.residual_broadcast(jp, 1, jp) + ctx.noise(jp);
  const double cross = ctx.lambda_band(jp, l, jp + 1, n, jp + 1) +
                       ctx.lambda_source_range(l + 1, n + 1, jp, l);
  return own - cross * cross / side;
}

}  // namespace

double quant_mi(const RateContext& ctx, int l, int m, int j) {
  const double q = ctx.allocation().noise_tail(l, m);
  if (!(q > 0.0)) return INFINITY;
  return std::log2(1.0 + quant_conditional_variance(ctx, l, j) / q);
}

SourceRateBound source_rate_bound(const RateContext& ctx, int k) {
  const int n = ctx.n_relays();
  if (k < 1 || k > n + 1) throw std::out_of_range("source_rate_bound: bad message level");
  SourceRateBound best;
  best.rate = INFINITY;
  for (int l = k; l <= n + 1; ++l) {
    double term;
    if (!source_direct_mi(ctx, k, l, term)) {
      best.valid = false;
      best.rate = 0.0;
      best.min_level = l;
      return best;
    }
    for (int j = k; j <= l - 1; ++j) term += source_relay_mi(ctx, k, j, l);
    if (term < best.rate) {
      best.rate = term;
      best.min_level = l;
    }
  }
  if (best.rate < 0.0 && best.rate > -1e-12) best.rate = 0.0;
  return best;
}

BroadcastRateBound broadcast_rate_bound(const RateContext& ctx, int l, int j) {
  const int n = ctx.n_relays();
  const int ml = ctx.ordering().refinements(l);
  if (l < 1 || l > n || j < 1 || j > ml)
    throw std::out_of_range("broadcast_rate_bound: bad indices");
  BroadcastRateBound best;
  best.rate = INFINITY;
  for (int kk = j; kk <= ml; ++kk) {
    const double rate = broadcast_mi(ctx, l, j, kk);
    if (rate < best.rate) {
      best.rate = rate;
      best.min_receiver = ctx.ordering().refine_target(l, kk);
    }
  }
  return best;
}

double quant_noise_threshold(const RateContext& ctx, int l, int m, double cum_rate) {
  const int n = ctx.n_relays();
  const int ml = ctx.ordering().refinements(l);
  if (l < 1 || l > n || m < 1 || m > ml)
    throw std::out_of_range("quant_noise_threshold: bad indices");
  if (!(cum_rate > 0.0)) return INFINITY;
  const double denom = std::exp2(cum_rate) - 1.0;
  double worst = 0.0;
  for (int j = m; j <= ml; ++j)
    worst = std::max(worst, quant_conditional_variance(ctx, l, j) / denom);
  return worst;
}

std::vector<QuantConstraint> quantization_feasible(
    const RateContext& ctx, const std::vector<std::vector<double>>& rhat) {
  const int n = ctx.n_relays();
  std::vector<QuantConstraint> out;
  for (int l = 1; l <= n; ++l) {
    const int ml = ctx.ordering().refinements(l);
    double cum = 0.0;
    for (int m = 1; m <= ml; ++m) {
      cum += rhat[l - 1][m - 1];
      QuantConstraint c;
      c.level = l;
      c.refinement = m;
      c.conveyed = cum > kRateFloor;
      if (c.conveyed) {
        c.threshold = quant_noise_threshold(ctx, l, m, cum);
        c.slack = ctx.allocation().noise_tail(l, m) - c.threshold;
      } else {
        c.threshold = INFINITY;
        c.slack = 0.0;
      }
      out.push_back(c);
    }
  }
  return out;
}

void solve_min_quant_noise(RateContext& ctx, PowerAllocation& alloc) {
  ctx.load(alloc);
  const int n = alloc.n_relays;
  for (int l = 1; l <= n; ++l) {
    const int ml = ctx.ordering().refinements(l);
    double tail_above = 0.0;  // noise tail of refinement m+1
    for (int m = ml; m >= 1; --m) {
      double tail = tail_above;
      if (ctx.conveyed()[l - 1][m - 1]) {
        const double thr =
            quant_noise_threshold(ctx, l, m, ctx.cumulative_broadcast_rate(l, m));
        tail = std::max(tail, std::max(thr * (1.0 + 1e-6), thr + 2.0 * kSlackGuard));
      }
      alloc.noise(l, m) = tail - tail_above;
      tail_above = tail;
    }
  }
}

void solve_min_quant_noise(const Topology& topo, const Ordering& ordering,
                           PowerAllocation& alloc) {
  RateContext ctx(topo, ordering);
  solve_min_quant_noise(ctx, alloc);
}

RateReport evaluate(RateContext& ctx, const PowerAllocation& alloc) {
  RateReport rep;
  const std::string err = check_allocation(alloc, ctx.topology().coherent);
  if (!err.empty()) throw std::invalid_argument("evaluate: " + err);
  ctx.load(alloc);
  const int n = ctx.n_relays();
  rep.broadcast_rates.resize(n);
  for (int l = 1; l <= n; ++l) {
    const int ml = ctx.ordering().refinements(l);
    rep.broadcast_rates[l - 1].resize(ml);
    for (int j = 1; j <= ml; ++j)
      rep.broadcast_rates[l - 1][j - 1] = broadcast_rate_bound(ctx, l, j).rate;
  }
  rep.quant_constraints = quantization_feasible(ctx, rep.broadcast_rates);
  bool quant_ok = true;
  for (const auto& c : rep.quant_constraints) {
    if (c.conveyed && c.slack <= -kSlackGuard * std::max(1.0, c.threshold)) {
      quant_ok = false;
      rep.diagnostic = "quantization constraint violated at level " + std::to_string(c.level) +
                       " refinement " + std::to_string(c.refinement);
    }
    rep.binding_constraints.emplace_back(
        "Q" + std::to_string(c.level) + "." + std::to_string(c.refinement),
        c.conveyed ? c.slack : INFINITY);
  }
  rep.source_rates.assign(n + 1, 0.0);
  rep.min_levels.assign(n + 1, 0);
  if (!quant_ok) {
    rep.feasible = false;
    rep.total = 0.0;
    return rep;
  }
  double total = 0.0;
  for (int k = 1; k <= n + 1; ++k) {
    const auto b = source_rate_bound(ctx, k);
    if (!b.valid) {
      rep.feasible = false;
      rep.total = 0.0;
      rep.diagnostic = "singular covariance when bounding a source layer";
      return rep;
    }
    rep.source_rates[k - 1] = b.rate;
    rep.min_levels[k - 1] = b.min_level;
    rep.binding_constraints.emplace_back(
        "Rs" + std::to_string(k) + "@L" + std::to_string(b.min_level), 0.0);
    total += b.rate;
  }
  rep.feasible = true;
  rep.total = total;
  return rep;
}

RateReport evaluate(const Topology& topo, const Ordering& ordering,
                    const PowerAllocation& alloc) {
  RateContext ctx(topo, ordering);
  return evaluate(ctx, alloc);
}

}  // namespace relaynet
