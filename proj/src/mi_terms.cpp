#include "relaynet/mi_terms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relaynet {

std::string var_U(int k) { return "U" + std::to_string(k); }
std::string var_V(int l, int k) { return "V" + std::to_string(l) + "_" + std::to_string(k); }
std::string var_W(int l, int m) { return "W" + std::to_string(l) + "_" + std::to_string(m); }
std::string var_Yh(int l, int m) { return "Yh" + std::to_string(l) + "_" + std::to_string(m); }
std::string var_Y(int l) { return "Y" + std::to_string(l); }

namespace {

void add_unique(std::vector<std::string>& set, std::string v) {
  if (std::find(set.begin(), set.end(), v) == set.end()) set.push_back(std::move(v));
}

// W variables of sender i known at decoding level l: the decoded prefix for
// upstream senders, everything for the level itself.
void add_known_broadcasts(std::vector<std::string>& z, int n, const Ordering& ord, int i,
                          int l) {
  if (i < 1 || i > n) return;
  const int hi = (i == l) ? ord.refinements(i) : ord.refine_index(i, l);
  for (int m = 1; m <= hi; ++m) add_unique(z, var_W(i, m));
}

}  // namespace

MiTerm source_direct_term(int n, const Ordering& ord, int k, int l) {
  MiTerm t;
  t.x.push_back(var_U(k));
  t.y.push_back(var_Y(l));
  for (int lp = 1; lp <= k - 1; ++lp) {
    const int ref = ord.refine_index(lp, l);
    if (ref >= 1) t.y.push_back(var_Yh(lp, ref));
  }
  for (int m = 1; m <= k - 1; ++m) add_unique(t.z, var_U(m));
  for (int i = 1; i <= l; ++i) {
    for (int lp = i; lp <= n; ++lp) add_unique(t.z, var_V(lp, i));
    add_known_broadcasts(t.z, n, ord, i, l);
  }
  return t;
}

MiTerm source_relay_term(int n, const Ordering& ord, int k, int j, int l) {
  MiTerm t;
  t.x.push_back(var_V(j, k));
  t.y.push_back(var_Y(l));
  for (int m = 1; m <= k - 1; ++m) add_unique(t.z, var_V(j, m));
  for (int i = j + 1; i <= l; ++i) {
    if (i <= n)
      for (int m = 1; m <= i; ++m) add_unique(t.z, var_V(i, m));
    add_known_broadcasts(t.z, n, ord, i, l);
  }
  for (int lp = l; lp <= n; ++lp)
    for (int m = 1; m <= std::min(l, lp); ++m) add_unique(t.z, var_V(lp, m));
  return t;
}

MiTerm broadcast_term(int n, const Ordering& ord, int l, int j, int receiver) {
  MiTerm t;
  t.x.push_back(var_W(l, j));
  t.y.push_back(var_Y(receiver));
  for (int m = 1; m <= l; ++m) add_unique(t.z, var_V(l, m));
  for (int m = 1; m <= j - 1; ++m) add_unique(t.z, var_W(l, m));
  for (int i = l + 1; i <= receiver; ++i) {
    if (i <= n)
      for (int m = 1; m <= i; ++m) add_unique(t.z, var_V(i, m));
    add_known_broadcasts(t.z, n, ord, i, receiver);
  }
  for (int lp = receiver + 1; lp <= n; ++lp)
    for (int m = 1; m <= std::min(receiver, lp); ++m) add_unique(t.z, var_V(lp, m));
  return t;
}

MiTerm quantization_term(int n, const Ordering& ord, int l, int m, int side) {
  MiTerm t;
  t.x.push_back(var_Yh(l, m));
  t.y.push_back(var_Y(l));
  t.z.push_back(var_Y(side));
  for (int k = 1; k <= l; ++k) add_unique(t.z, var_U(k));
  for (int i = 1; i <= side; ++i) {
    for (int lp = i; lp <= n; ++lp) add_unique(t.z, var_V(lp, i));
    add_known_broadcasts(t.z, n, ord, i, side);
  }
  return t;
}

DiscreteBounds discrete_rate_bounds(const JointPmf& pmf, int n, const Ordering& ord) {
  if (ord.n_relays() != n) throw std::invalid_argument("discrete_rate_bounds: ordering/N mismatch");
  auto filter_known = [&](std::vector<std::string> vars) {
    for (const auto& v : vars)
      if (!pmf.has(v))
        throw std::invalid_argument("discrete_rate_bounds: pmf is missing variable '" + v + "'");
    return vars;
  };
  auto eval_term = [&](const MiTerm& t) {
    return cond_mutual_info(pmf, filter_known(t.x), filter_known(t.y), filter_known(t.z));
  };

  DiscreteBounds out;
  for (int k = 1; k <= n + 1; ++k) {
    DiscreteConstraint c;
    c.id = "Rs" + std::to_string(k);
    c.bound = INFINITY;
    for (int l = k; l <= n + 1; ++l) {
      double v = eval_term(source_direct_term(n, ord, k, l));
      for (int j = k; j <= l - 1; ++j) v += eval_term(source_relay_term(n, ord, k, j, l));
      if (v < c.bound) {
        c.bound = v;
        c.extremal_index = l;
      }
    }
    out.source.push_back(c);
  }
  for (int l = 1; l <= n; ++l)
    for (int j = 1; j <= ord.refinements(l); ++j) {
      DiscreteConstraint c;
      c.id = "Rhat" + std::to_string(l) + "." + std::to_string(j);
      c.bound = INFINITY;
      for (int kk = j; kk <= ord.refinements(l); ++kk) {
        const int kp = ord.refine_target(l, kk);
        const double v = eval_term(broadcast_term(n, ord, l, j, kp));
        if (v < c.bound) {
          c.bound = v;
          c.extremal_index = kp;
        }
      }
      out.broadcast.push_back(c);
    }
  for (int l = 1; l <= n; ++l)
    for (int m = 1; m <= ord.refinements(l); ++m) {
      DiscreteConstraint c;
      c.id = "Q" + std::to_string(l) + "." + std::to_string(m);
      c.bound = 0.0;
      for (int j = m; j <= ord.refinements(l); ++j) {
        const int jp = ord.refine_target(l, j);
        const double v = eval_term(quantization_term(n, ord, l, m, jp));
        if (v > c.bound) {
          c.bound = v;
          c.extremal_index = jp;
        }
      }
      out.quantization.push_back(c);
    }
  return out;
}

}  // namespace relaynet
