#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "relaynet/pmf.hpp"
#include "relaynet/mi_terms.hpp"

using namespace relaynet;

namespace {

double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

std::vector<double> dirichlet(std::mt19937_64& rng, size_t n) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> v(n);
  double s = 0;
  for (auto& x : v) {
    x = g(rng);
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

// independent-route entropy evaluation: I(X;Y|Z) from four joint entropies
double mi_via_entropies(const JointPmf& pmf, const std::vector<std::string>& x,
                        const std::vector<std::string>& y, const std::vector<std::string>& z) {
  auto join = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    for (const auto& v : b) a.push_back(v);
    return a;
  };
  return entropy(pmf, join(x, z)) + entropy(pmf, join(y, z)) - entropy(pmf, join(join(x, y), z)) -
         entropy(pmf, z);
}

}  // namespace

TEST_CASE("joint pmf construction and marginals") {
  CHECK_THROWS(JointPmf({"X"}, {2}, {0.5, 0.6}));          // not normalized
  CHECK_THROWS(JointPmf({"X"}, {2}, {1.2, -0.2}));         // negative mass
  CHECK_THROWS(JointPmf({"X", "X"}, {2, 2}, std::vector<double>(4, 0.25)));
  CHECK_THROWS(JointPmf({"X"}, {2}, {0.5, 0.5, 0.0}));     // wrong table size
  // table-size cap
  CHECK_THROWS(JointPmf({"A", "B", "C", "D"}, {300, 300, 300, 300}, {}));

  const JointPmf p({"X", "Y"}, {2, 2}, {0.1, 0.2, 0.3, 0.4});
  const JointPmf mx = p.marginal({0});
  CHECK(mx.probs()[0] == doctest::Approx(0.3));
  CHECK(mx.probs()[1] == doctest::Approx(0.7));
}

TEST_CASE("conditional mutual information basics") {
  SUBCASE("independent variables") {
    std::vector<double> t;
    for (double px : {0.3, 0.7})
      for (double py : {0.6, 0.4}) t.push_back(px * py);
    const JointPmf p({"X", "Y"}, {2, 2}, t);
    CHECK(cond_mutual_info(p, {"X"}, {"Y"}, {}) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("identical uniform bits carry one bit") {
    const JointPmf p({"X", "Y"}, {2, 2}, {0.5, 0.0, 0.0, 0.5});
    CHECK(cond_mutual_info(p, {"X"}, {"Y"}, {}) == doctest::Approx(1.0));
  }
  SUBCASE("binary symmetric channel") {
    const double eps = 0.11;
    std::vector<double> t = {0.5 * (1 - eps), 0.5 * eps, 0.5 * eps, 0.5 * (1 - eps)};
    const JointPmf p({"X", "Y"}, {2, 2}, t);
    CHECK(cond_mutual_info(p, {"X"}, {"Y"}, {}) == doctest::Approx(1.0 - h2(eps)).epsilon(1e-9));
  }
  SUBCASE("overlapping sets rejected") {
    const JointPmf p({"X", "Y"}, {2, 2}, {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS(cond_mutual_info(p, {"X"}, {"X"}, {}));
    CHECK_THROWS(cond_mutual_info(p, {"X"}, {"Y"}, {"Y"}));
    CHECK_THROWS(cond_mutual_info(p, {"X"}, {"Z"}, {}));
  }
  SUBCASE("symmetry and nonnegativity on random tables") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
      const JointPmf p({"X", "Y", "Z"}, {2, 3, 2}, dirichlet(rng, 12));
      const double a = cond_mutual_info(p, {"X"}, {"Y"}, {"Z"});
      const double b = cond_mutual_info(p, {"Y"}, {"X"}, {"Z"});
      CHECK(a >= 0.0);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
      CHECK(a == doctest::Approx(mi_via_entropies(p, {"X"}, {"Y"}, {"Z"})).epsilon(1e-9));
    }
  }
}

TEST_CASE("markov verification") {
  SUBCASE("deterministic function of the middle variable") {
    // C = B, A arbitrary given B
    std::vector<double> t(8, 0.0);
    // order A,B,C
    auto idx = [](int a, int b, int c) { return a * 4 + b * 2 + c; };
    t[idx(0, 0, 0)] = 0.3;
    t[idx(1, 0, 0)] = 0.2;
    t[idx(0, 1, 1)] = 0.1;
    t[idx(1, 1, 1)] = 0.4;
    const JointPmf p({"A", "B", "C"}, {2, 2, 2}, t);
    const auto chk = verify_markov(p, {"A"}, {"B"}, {"C"});
    CHECK(chk.holds);
    CHECK(chk.deviation < 1e-12);
  }
  SUBCASE("dependence through the chain is detected") {
    // C = A exactly, B independent coin
    std::vector<double> t(8, 0.0);
    auto idx = [](int a, int b, int c) { return a * 4 + b * 2 + c; };
    t[idx(0, 0, 0)] = 0.25;
    t[idx(0, 1, 0)] = 0.25;
    t[idx(1, 0, 1)] = 0.25;
    t[idx(1, 1, 1)] = 0.25;
    const JointPmf p({"A", "B", "C"}, {2, 2, 2}, t);
    const auto chk = verify_markov(p, {"A"}, {"B"}, {"C"});
    CHECK(!chk.holds);
    CHECK(chk.deviation == doctest::Approx(1.0));
  }
}

TEST_CASE("data processing on verified chains") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    // build A - B - C by sampling p(a), p(b|a), p(c|b)
    std::vector<double> pa = dirichlet(rng, 2);
    std::vector<std::vector<double>> pba{dirichlet(rng, 2), dirichlet(rng, 2)};
    std::vector<std::vector<double>> pcb{dirichlet(rng, 2), dirichlet(rng, 2)};
    std::vector<double> tbl(8, 0.0);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) tbl[a * 4 + b * 2 + c] = pa[a] * pba[a][b] * pcb[b][c];
    const JointPmf p({"A", "B", "C"}, {2, 2, 2}, tbl);
    CHECK(verify_markov(p, {"A"}, {"B"}, {"C"}).holds);
    CHECK(cond_mutual_info(p, {"A"}, {"C"}, {}) <=
          cond_mutual_info(p, {"A"}, {"B"}, {}) + 1e-12);
  }
}

TEST_CASE("identity checks") {
  std::mt19937_64 rng(23);
  SUBCASE("chain rule is exact on random tables") {
    for (int t = 0; t < 1000; ++t) {
      const JointPmf p({"X", "Y", "U", "W"}, {2, 2, 2, 2}, dirichlet(rng, 16));
      const auto chk = mi_identity_gaps(p);
      CHECK(chk.chain_residual < 1e-12);
    }
  }
  SUBCASE("conditional independence collapses the pair term") {
    for (int t = 0; t < 200; ++t) {
      // X - U - W with arbitrary Y given (X, U, W)
      std::vector<double> pu = dirichlet(rng, 2);
      std::vector<std::vector<double>> pxu{dirichlet(rng, 2), dirichlet(rng, 2)};
      std::vector<std::vector<double>> pwu{dirichlet(rng, 2), dirichlet(rng, 2)};
      std::vector<std::vector<double>> py(8);
      for (auto& v : py) v = dirichlet(rng, 2);
      std::vector<double> tbl(16, 0.0);
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          for (int u = 0; u < 2; ++u)
            for (int w = 0; w < 2; ++w)
              tbl[((x * 2 + y) * 2 + u) * 2 + w] =
                  pu[u] * pxu[u][x] * pwu[u][w] * py[(x * 2 + u) * 2 + w][y];
      const JointPmf p({"X", "Y", "U", "W"}, {2, 2, 2, 2}, tbl);
      const auto chk = mi_identity_gaps(p);
      CHECK(chk.markov_gap < 1e-10);
      CHECK(chk.chain_residual < 1e-12);
    }
  }
  SUBCASE("a deterministic copy breaks the hypothesis but not the chain rule") {
    // W = X, U independent
    std::vector<double> tbl(16, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int u = 0; u < 2; ++u) tbl[((x * 2 + y) * 2 + u) * 2 + x] = 0.125;
    const JointPmf p({"X", "Y", "U", "W"}, {2, 2, 2, 2}, tbl);
    const auto chk = mi_identity_gaps(p);
    CHECK(chk.markov_gap == doctest::Approx(1.0));  // equals I(X;W|U)
    CHECK(chk.chain_residual < 1e-12);
  }
}

TEST_CASE("discretized gaussian converges to the closed form") {
  const double rho = 0.6;
  const double closed = -0.5 * std::log2(1 - rho * rho);
  auto discretize = [&](int bins) {
    // nested dyadic grids over [-4, 4]
    std::vector<double> t(bins * bins, 0.0);
    const double lo = -4.0, hi = 4.0;
    const double w = (hi - lo) / bins;
    const int sub = 8;  // numerical quadrature inside each cell
    double norm = 0.0;
    for (int i = 0; i < bins; ++i)
      for (int j = 0; j < bins; ++j) {
        double acc = 0.0;
        for (int a = 0; a < sub; ++a)
          for (int b = 0; b < sub; ++b) {
            const double x = lo + (i + (a + 0.5) / sub) * w;
            const double y = lo + (j + (b + 0.5) / sub) * w;
            acc += std::exp(-(x * x - 2 * rho * x * y + y * y) / (2 * (1 - rho * rho)));
          }
        t[i * bins + j] = acc;
        norm += acc;
      }
    for (auto& v : t) v /= norm;
    return JointPmf({"X", "Y"}, {bins, bins}, t);
  };
  double prev = -1.0;
  for (int bins : {4, 8, 16, 32}) {
    const double mi = cond_mutual_info(discretize(bins), {"X"}, {"Y"}, {});
    CHECK(mi > prev);  // refining the grid only adds information
    CHECK(mi < closed + 1e-6);
    prev = mi;
  }
  CHECK(std::abs(prev - closed) < 0.02);
}

TEST_CASE("pmf text round trip and strictness") {
  std::istringstream in(
      "# comment\n"
      "var X 2\n"
      "var Y 3\n"
      "p X=0 Y=0 0.5\n"
      "p X=1 Y=2 0.25\n"
      "p X=0 Y=1 0.25\n");
  const JointPmf p = parse_pmf(in);
  CHECK(p.n_vars() == 2);
  CHECK(cond_mutual_info(p, {"X"}, {"Y"}, {}) > 0.0);
  std::ostringstream out;
  write_pmf(out, p);
  std::istringstream back(out.str());
  const JointPmf q = parse_pmf(back);
  REQUIRE(q.size() == p.size());
  for (std::int64_t e = 0; e < p.size(); ++e)
    CHECK(q.probs()[e] == doctest::Approx(p.probs()[e]).epsilon(1e-14));

  std::istringstream bad1("var X 2\np X=0 0.5\np X=1 0.6\n");
  CHECK_THROWS(parse_pmf(bad1));  // unnormalized
  std::istringstream bad2("var X 2\nq X=0 1.0\n");
  CHECK_THROWS(parse_pmf(bad2));  // unknown directive
  std::istringstream bad3("var X 2\nvar Y 2\np X=0 1.0\n");
  CHECK_THROWS(parse_pmf(bad3));  // entry must assign every variable
  std::istringstream bad4("var X 2\np X=2 1.0\n");
  CHECK_THROWS(parse_pmf(bad4));  // out of alphabet
}

TEST_CASE("layer bounds on explicit pmfs") {
  SUBCASE("point to point collapses to one term") {
    const double eps = 0.11;
    std::vector<double> t = {0.5 * (1 - eps), 0.5 * eps, 0.5 * eps, 0.5 * (1 - eps)};
    const JointPmf p({"U1", "Y1"}, {2, 2}, t);
    const auto b = discrete_rate_bounds(p, 0, Ordering::identity(0));
    REQUIRE(b.source.size() == 1);
    CHECK(b.source[0].bound == doctest::Approx(1.0 - h2(eps)).epsilon(1e-9));
    CHECK(b.broadcast.empty());
    CHECK(b.quantization.empty());
  }
  SUBCASE("missing variables are reported") {
    const JointPmf p({"U1", "Y1"}, {2, 2}, {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_WITH_AS(discrete_rate_bounds(p, 1, Ordering::identity(1)),
                         doctest::Contains("missing variable"), std::invalid_argument);
  }
}

TEST_CASE("single relay bounds against an exhaustive oracle") {
  // N = 1 with binary alphabets; the joint table is built from the protocol
  // factorization with random conditional tables
  std::mt19937_64 rng(41);
  const int n = 1;
  const Ordering ord = Ordering::identity(n);
  const std::vector<std::string> names = {"U1", "U2", "V1_1", "W1_1", "Yh1_1", "Y1", "Y2"};
  const std::vector<int> sizes(7, 2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> pv = dirichlet(rng, 2);
    std::vector<std::vector<double>> pu1_v{dirichlet(rng, 2), dirichlet(rng, 2)};
    std::vector<std::vector<double>> pu2_u1{dirichlet(rng, 2), dirichlet(rng, 2)};
    std::vector<std::vector<double>> pw_v{dirichlet(rng, 2), dirichlet(rng, 2)};
    std::vector<std::vector<double>> pyh(16), py(16);
    for (auto& v : pyh) v = dirichlet(rng, 2);
    std::vector<std::vector<double>> pys(16);
    for (auto& v : pys) v = dirichlet(rng, 4);
    std::vector<double> tbl(128, 0.0);
    double norm = 0.0;
    for (int u1 = 0; u1 < 2; ++u1)
      for (int u2 = 0; u2 < 2; ++u2)
        for (int v = 0; v < 2; ++v)
          for (int w = 0; w < 2; ++w)
            for (int yh = 0; yh < 2; ++yh)
              for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2) {
                  // channel p(y1,y2 | u1,u2,v,w), quantization p(yh | y1,u1,v,w)
                  const double prob = pv[v] * pu1_v[v][u1] * pu2_u1[u1][u2] * pw_v[v][w] *
                                      pys[((u1 * 2 + u2) * 2 + v) * 2 + w][y1 * 2 + y2] *
                                      pyh[((y1 * 2 + u1) * 2 + v) * 2 + w][yh];
                  tbl[((((((u1 * 2 + u2) * 2 + v) * 2 + w) * 2 + yh) * 2 + y1) * 2 + y2)] = prob;
                  norm += prob;
                }
    for (auto& x : tbl) x /= norm;
    const JointPmf pmf(names, sizes, tbl);
    const auto b = discrete_rate_bounds(pmf, n, ord);

    // independent evaluation of the same expressions through joint entropies
    const double rs1 = std::min(
        mi_via_entropies(pmf, {"U1"}, {"Y1"}, {"V1_1", "W1_1"}),
        mi_via_entropies(pmf, {"U1"}, {"Y2"}, {"V1_1", "W1_1"}) +
            mi_via_entropies(pmf, {"V1_1"}, {"Y2"}, {}));
    const double rs2 =
        mi_via_entropies(pmf, {"U2"}, {"Y2", "Yh1_1"}, {"U1", "V1_1", "W1_1"});
    const double rhat = mi_via_entropies(pmf, {"W1_1"}, {"Y2"}, {"V1_1"});
    const double q = mi_via_entropies(pmf, {"Yh1_1"}, {"Y1"}, {"Y2", "U1", "V1_1", "W1_1"});
    REQUIRE(b.source.size() == 2);
    CHECK(b.source[0].bound == doctest::Approx(rs1).epsilon(1e-9));
    CHECK(b.source[1].bound == doctest::Approx(rs2).epsilon(1e-9));
    REQUIRE(b.broadcast.size() == 1);
    CHECK(b.broadcast[0].bound == doctest::Approx(rhat).epsilon(1e-9));
    REQUIRE(b.quantization.size() == 1);
    CHECK(b.quantization[0].bound == doctest::Approx(q).epsilon(1e-9));
  }
}

TEST_CASE("degenerate relay variables collapse to the direct bound") {
  // all relay-side variables constant: the layer-2 bound equals I(U2; Y2)
  std::mt19937_64 rng(51);
  std::vector<double> tbl(128, 0.0);
  std::vector<double> pu = dirichlet(rng, 4);
  std::vector<std::vector<double>> py(4);
  for (auto& v : py) v = dirichlet(rng, 2);
  for (int u1 = 0; u1 < 2; ++u1)
    for (int u2 = 0; u2 < 2; ++u2)
      for (int y2 = 0; y2 < 2; ++y2) {
        const double prob = pu[u1 * 2 + u2] * py[u1 * 2 + u2][y2];
        tbl[((((u1 * 2 + u2) * 2 + 0) * 2 + 0) * 2 + 0) * 4 + 0 * 2 + y2] += prob;
      }
  const JointPmf pmf({"U1", "U2", "V1_1", "W1_1", "Yh1_1", "Y1", "Y2"},
                     {2, 2, 2, 2, 2, 2, 2}, tbl);
  const auto b = discrete_rate_bounds(pmf, 1, Ordering::identity(1));
  CHECK(b.source[1].bound ==
        doctest::Approx(mi_via_entropies(pmf, {"U2"}, {"Y2"}, {"U1"})).epsilon(1e-9));
  CHECK(b.quantization[0].bound == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("factored pmf satisfies the refinement chain") {
  // two relays, binary alphabets: quantizations generated per the protocol
  // factorization must pass the refinement Markov test
  std::mt19937_64 rng(61);
  const std::vector<std::string> names = {"U1",    "V1_1",  "W1_1", "W1_2",
                                          "Yh1_1", "Yh1_2", "Y1",   "Y2"};
  // order: U1, V1_1, W1_1, W1_2, Yh1_1, Yh1_2, Y1, Y2
  std::vector<double> tbl(256, 0.0);
  std::vector<double> pv = dirichlet(rng, 2);
  std::vector<std::vector<double>> pu{dirichlet(rng, 2), dirichlet(rng, 2)};
  std::vector<std::vector<double>> pw1{dirichlet(rng, 2), dirichlet(rng, 2)};
  std::vector<std::vector<double>> pw2(4), py(8), yh2(16), yh1(16);
  for (auto& v : pw2) v = dirichlet(rng, 2);
  for (auto& v : py) v = dirichlet(rng, 4);
  for (auto& v : yh2) v = dirichlet(rng, 2);
  for (auto& v : yh1) v = dirichlet(rng, 2);
  double norm = 0.0;
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v)
      for (int w1 = 0; w1 < 2; ++w1)
        for (int w2 = 0; w2 < 2; ++w2)
          for (int h1 = 0; h1 < 2; ++h1)
            for (int h2 = 0; h2 < 2; ++h2)
              for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2) {
                  // finest refinement from the output, coarser one from the
                  // finer: Yh1_1 depends on Yh1_2 (plus context), not on Y1
                  const double prob = pv[v] * pu[v][u] * pw1[v][w1] * pw2[w1 * 2 + v][w2] *
                                      py[(u * 2 + v) * 2 + w1][y1 * 2 + y2] *
                                      yh2[((y1 * 2 + u) * 2 + v) * 2 + w1][h2] *
                                      yh1[((h2 * 2 + u) * 2 + v) * 2 + w1][h1];
                  tbl[((((((u * 2 + v) * 2 + w1) * 2 + w2) * 2 + h1) * 2 + h2) * 2 + y1) * 2 +
                      y2] = prob;
                  norm += prob;
                }
  for (auto& x : tbl) x /= norm;
  const JointPmf pmf(names, {2, 2, 2, 2, 2, 2, 2, 2}, tbl);
  const auto chk =
      verify_markov(pmf, {"Yh1_1"}, {"Yh1_2", "U1", "V1_1", "W1_1"}, {"Y1"});
  CHECK(chk.holds);
  CHECK(chk.deviation < 1e-10);
  // and a direct draw without the chain structure fails the same test
  std::vector<double> flat = dirichlet(rng, 256);
  const JointPmf bad(names, {2, 2, 2, 2, 2, 2, 2, 2}, flat);
  CHECK(!verify_markov(bad, {"Yh1_1"}, {"Yh1_2", "U1", "V1_1", "W1_1"}, {"Y1"}).holds);
}
