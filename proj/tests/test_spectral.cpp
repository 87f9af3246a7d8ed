#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "confpack/spectral.hpp"
#include "oracles.hpp"

using namespace confpack;

namespace {

Graph random_connected(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(static_cast<Vertex>(rng() % v), v);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (to_unit(rng()) < p) e.emplace_back(u, v);
  return Graph(n, e);
}

}  // namespace

TEST_CASE("small spectra by hand") {
  const auto k4 = spectrum(oracle::complete(4));
  CHECK(k4.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(k4.eigenvalues[i] == doctest::Approx(4.0 / 3.0));
  const auto p3 = spectrum(oracle::path(3));
  CHECK(p3.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(p3.eigenvalues[2] == doctest::Approx(2.0));
  const Graph two(4, std::vector<Edge>{{0, 1}, {2, 3}});
  const auto s2 = spectrum(two);
  CHECK(s2.components == 2);
  CHECK(std::abs(s2.eigenvalues[1]) < 1e-12);
  CHECK(s2.counting(2.0 + 1e-9) == 2);
  CHECK(s2.counting(0.5) == 0);
  CHECK_THROWS_AS(spectrum(Graph(3, std::vector<Edge>{{0, 1}})), InvalidArgument);
  CHECK_THROWS_AS(spectrum(oracle::path(10), 5), InvalidArgument);
}

TEST_CASE("trace identity and full count on random graphs") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5 + rng() % 80;
    const auto g = random_connected(rng, n, 0.05);
    const auto s = spectrum(g);
    double tr = 0.0;
    for (double l : s.eigenvalues) tr += l;
    CHECK(tr == doctest::Approx(static_cast<double>(n)).epsilon(1e-10));
    CHECK(s.counting(2.0 + 1e-12) == n - s.components);
    CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    CHECK(s.eigenvalues.back() <= 2.0 + 1e-10);
    CHECK(s.eigenvalues.front() >= -1e-10);
  }
}

TEST_CASE("path spectrum matches the closed form") {
  const auto s = spectrum(oracle::path(256));
  const auto ref = oracle::path_spectrum(256);
  double worst = 0.0;
  for (std::size_t k = 0; k < 256; ++k) worst = std::max(worst, std::abs(s.eigenvalues[k] - ref[k]));
  CHECK(worst <= 1e-8);
}

TEST_CASE("torus spectrum counts") {
  const auto g = oracle::torus(12);
  const auto s = spectrum(g);
  std::vector<double> ref;
  for (int a = 0; a < 12; ++a)
    for (int b = 0; b < 12; ++b)
      ref.push_back(1.0 - (std::cos(2 * std::numbers::pi * a / 12) + std::cos(2 * std::numbers::pi * b / 12)) / 2);
  std::sort(ref.begin(), ref.end());
  for (std::size_t k = 0; k < ref.size(); ++k) CHECK(s.eigenvalues[k] == doctest::Approx(ref[k]).scale(1.0).epsilon(1e-9));
}

TEST_CASE("weyl rows recompute by hand") {
  const auto g = oracle::grid(10, 10);
  const auto s = spectrum(g);
  const auto w = weyl_check(s, g, 2.0);
  REQUIRE(w.per_k.size() == 99);
  const auto prof = degree_profile(g);
  CHECK(prof[0] == 0);
  CHECK(prof[1] == 4);
  CHECK(prof[100] == 2 * g.edge_count());
  for (const auto& row : w.per_k) {
    const double k = static_cast<double>(row.k);
    const double lg = std::log(std::numbers::e * 100.0 / k);
    const double shape = prof[row.k] / k * lg * lg * (k / 100.0);
    CHECK(row.shape == doctest::Approx(shape));
    CHECK(row.ratio <= w.C_emp);
    CHECK(row.lower_ratio >= w.c_emp);
  }
  CHECK(w.C_emp > 0.0);
  CHECK(w.c_emp > 0.0);
  CHECK(w.counting_const_log_ratio > 0.0);
  CHECK(w.counting_const_inverse > 0.0);
}

TEST_CASE("tent on a long path has small Rayleigh quotient") {
  const auto p = oracle::path(100);
  WeightedGraphMetric m(p, std::vector<double>(100, 1.0));
  const auto r = ball_carving_bumps(m, 40.0, 41);
  REQUIRE(r.count() >= 2);
  CHECK(r.max_rayleigh <= 0.05);
  // a hand-built interior tent: f = 1 - d/10 for d < 10 around vertex 50
  std::vector<double> f(100, 0.0);
  for (int v = 41; v <= 59; ++v) f[v] = 1.0 - std::abs(v - 50) / 10.0;
  CHECK(rayleigh(p, f) <= 0.05);
  CHECK(rayleigh(p, f) == doctest::Approx(0.2 / 13.4));
}

TEST_CASE("bump supports are disjoint and non-adjacent") {
  std::mt19937_64 rng(12);
  std::vector<Graph> graphs{oracle::grid(30, 30), oracle::torus(20), oracle::path(500)};
  for (int i = 0; i < 5; ++i) graphs.push_back(random_connected(rng, 300, 0.004));
  for (const auto& g : graphs) {
    const std::size_t n = g.vertex_count();
    std::vector<double> w(n);
    for (auto& x : w) x = 0.5 + to_unit(rng());
    WeightedGraphMetric m(g, w);
    for (double R : {2.0, 5.0, 9.0}) {
      std::size_t K = 0;
      for (Vertex x = 0; x < n; ++x) K = std::max(K, m.ball(x, R).size());
      const auto r = ball_carving_bumps(m, R, K);
      std::vector<int> owner(n, -1);
      std::size_t clashes = 0;
      for (std::size_t b = 0; b < r.count(); ++b)
        for (auto [v, fv] : r.bumps[b].values) {
          CHECK(fv > 0.0);
          if (owner[v] != -1) ++clashes;
          owner[v] = static_cast<int>(b);
        }
      for (const auto& [u, v] : g.edges())
        if (owner[u] != -1 && owner[v] != -1 && owner[u] != owner[v]) ++clashes;
      CHECK(clashes == 0);
      for (std::size_t b = 0; b < r.count(); ++b) {
        const auto f = r.dense(b, n);
        CHECK(rayleigh(g, f) == doctest::Approx(r.bumps[b].rayleigh).epsilon(1e-10));
        CHECK(r.bumps[b].rayleigh <= r.bumps[b].lipschitz_bound + 1e-12);
      }
      if (n <= kDenseCap && r.count() >= 1) {
        const auto s = spectrum(g);
        CHECK(s.eigenvalues[r.count() - 1] <= r.max_rayleigh + 1e-9);
      }
    }
  }
}

TEST_CASE("bump count meets n / (2K) on the grid") {
  const auto g = oracle::grid(40, 40);
  WeightedGraphMetric m(g, std::vector<double>(1600, 1.0));
  for (double R : {4.0, 8.0, 12.0}) {
    std::size_t K = 0;
    for (Vertex x = 0; x < 1600; ++x) K = std::max(K, m.ball(x, R).size());
    const auto r = ball_carving_bumps(m, R, K);
    CHECK(r.count_bound_met(1600));
  }
}

TEST_CASE("return probabilities by hand") {
  const Graph k2(2, std::vector<Edge>{{0, 1}});
  for (auto method : {HeatMethod::Propagation, HeatMethod::Spectral}) {
    HeatOptions o;
    o.method = method;
    for (const auto& h : heat_kernel(k2, 0, 5, o)) CHECK(h.p == doctest::Approx(1.0));
    const Graph c4(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    for (const auto& h : heat_kernel(c4, 0, 6, o)) CHECK(h.p == doctest::Approx(0.5));
  }
  HeatOptions mc;
  mc.method = HeatMethod::MonteCarlo;
  CHECK_THROWS_AS(heat_kernel(k2, 0, 3, mc), InvalidArgument);
  mc.seed = 1;
  for (const auto& h : heat_kernel(k2, 0, 3, mc)) {
    CHECK(h.p == 1.0);
    CHECK(h.stderr_ == 0.0);
  }
}

TEST_CASE("exact routes agree with the torus closed form") {
  const auto g = oracle::torus(16);
  HeatOptions prop, spec;
  prop.method = HeatMethod::Propagation;
  spec.method = HeatMethod::Spectral;
  const auto a = heat_kernel(g, 0, 60, prop);
  const auto b = heat_kernel(g, 0, 60, spec);
  for (std::size_t t = 1; t <= 60; ++t) {
    const double ref = oracle::torus_return(16, t);
    CHECK(a[t - 1].p == doctest::Approx(ref).epsilon(1e-10));
    CHECK(b[t - 1].p == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("Monte Carlo agrees with the exact series and is reproducible") {
  const auto g = oracle::torus(16);
  HeatOptions mc;
  mc.method = HeatMethod::MonteCarlo;
  mc.seed = 99;
  mc.walks = 1u << 16;
  const auto est = heat_kernel(g, 3, 40, mc);
  std::size_t outside = 0;
  for (const auto& h : est) {
    const double ref = oracle::torus_return(16, h.t);
    const double se = std::sqrt(ref * (1 - ref) / static_cast<double>(mc.walks));
    if (std::abs(h.p - ref) > 4.0 * se) ++outside;
  }
  CHECK(outside <= 1);
  const auto again = heat_kernel(g, 3, 40, mc);
  for (std::size_t i = 0; i < est.size(); ++i) CHECK(est[i].p == again[i].p);
}

TEST_CASE("dimension fit recovers known slopes") {
  std::vector<HeatPoint> s;
  for (std::size_t t = 1; t <= 200; ++t) s.push_back({t, 3.0 * std::pow(static_cast<double>(t), -1.5), 0.0, false});
  CHECK(spectral_dim_fit(s, 10, 100).dimension == doctest::Approx(3.0));
  s[20].p = 0.0;
  const auto fit = spectral_dim_fit(s, 10, 100);
  CHECK(fit.excluded == std::vector<std::size_t>{21});
  CHECK(fit.used == 90);
  CHECK_THROWS_AS(spectral_dim_fit(s, 50, 50), InvalidArgument);

  std::vector<HeatPoint> torus;
  for (std::size_t t = 1; t <= 200; ++t) torus.push_back({t, oracle::torus_return(64, t), 0.0, false});
  CHECK(spectral_dim_fit(torus, 20, 200).dimension == doctest::Approx(2.0).epsilon(0.05));
}
