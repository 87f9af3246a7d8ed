#include "confpack/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <numbers>
#include <random>

namespace confpack {

std::size_t SpectrumReport::counting(double lambda) const {
  std::size_t c = 0;
  for (std::size_t k = std::max<std::size_t>(components, 1); k < eigenvalues.size(); ++k)
    if (eigenvalues[k] <= lambda) ++c;
  return c;
}

namespace {

Eigen::MatrixXd symmetric_walk_matrix(const Graph& g) {
  const std::size_t n = g.vertex_count();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (auto [u, v] : g.edges()) {
    const double w = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) * g.degree(v));
    S(u, v) = w;
    S(v, u) = w;
  }
  return S;
}

void require_no_isolated(const Graph& g, std::size_t cap) {
  const std::size_t n = g.vertex_count();
  require(n >= 1, "spectrum: empty graph");
  require(n <= cap, "spectrum: " + std::to_string(n) + " vertices exceeds the dense-solve cap of " +
                        std::to_string(cap) + "; use the heat-kernel Monte Carlo path instead");
  for (Vertex v = 0; v < n; ++v)
    require(g.degree(v) > 0, "spectrum: vertex " + std::to_string(v) + " is isolated");
}

}  // namespace

SpectrumReport spectrum(const Graph& g, std::size_t cap) {
  require_no_isolated(g, cap);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric_walk_matrix(g),
                                                          Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "spectrum: eigensolver did not converge");
  SpectrumReport r;
  r.n = g.vertex_count();
  r.components = g.components().second;
  const auto& mu = es.eigenvalues();
  r.eigenvalues.resize(r.n);
  for (std::size_t i = 0; i < r.n; ++i) r.eigenvalues[i] = 1.0 - mu(static_cast<Eigen::Index>(r.n - 1 - i));
  return r;
}

std::vector<std::size_t> degree_profile(const Graph& g) {
  std::vector<std::size_t> deg(g.vertex_count());
  for (Vertex v = 0; v < deg.size(); ++v) deg[v] = g.degree(v);
  std::sort(deg.begin(), deg.end(), std::greater<>());
  std::vector<std::size_t> prof(deg.size() + 1, 0);
  for (std::size_t k = 0; k < deg.size(); ++k) prof[k + 1] = prof[k] + deg[k];
  return prof;
}

WeylCheck weyl_check(const SpectrumReport& s, const Graph& g, double d) {
  require(d >= 1.0, "weyl_check: d must be >= 1");
  require(s.n == g.vertex_count(), "weyl_check: spectrum and graph disagree on n");
  const auto prof = degree_profile(g);
  const double n = static_cast<double>(s.n);
  WeylCheck w;
  w.d = d;
  w.c_emp = kInf;
  for (std::size_t k = 1; k < s.n; ++k) {
    WeylRow row;
    row.k = k;
    row.lambda = s.eigenvalues[k];
    const double frac = static_cast<double>(k) / n;
    const double lg = std::log(std::numbers::e * n / static_cast<double>(k));
    const double scale = std::pow(frac, 2.0 / d);
    row.shape = (static_cast<double>(prof[k]) / static_cast<double>(k)) * lg * lg * scale;
    row.ratio = row.lambda / row.shape;
    row.lower_ratio = row.lambda / scale;
    if (row.ratio > w.C_emp) {
      w.C_emp = row.ratio;
      w.C_argmax = k;
    }
    if (row.lower_ratio < w.c_emp) {
      w.c_emp = row.lower_ratio;
      w.c_argmin = k;
    }
    w.per_k.push_back(row);
  }
  if (!std::isfinite(w.c_emp)) w.c_emp = 0.0;

  double c_log = kInf, c_inv = kInf;
  for (std::size_t k = 1; k < s.n; ++k) {
    const double lambda = s.eigenvalues[k];
    if (!(lambda > 0.0) || lambda > 1.0) continue;
    const auto m = static_cast<std::size_t>(std::floor(lambda * n));
    if (m < 1) continue;
    const double delta = static_cast<double>(prof[std::min(m, s.n)]);
    const double base = (lambda * n / delta) * n * std::pow(lambda, d / 2.0);
    const double lg = std::log(std::numbers::e / lambda);
    const double count = static_cast<double>(s.counting(lambda));
    c_log = std::min(c_log, count / (base / (lg * lg)));
    c_inv = std::min(c_inv, count / (base * lambda * lambda));
  }
  w.counting_const_log_ratio = std::isfinite(c_log) ? c_log : 0.0;
  w.counting_const_inverse = std::isfinite(c_inv) ? c_inv : 0.0;
  return w;
}

double rayleigh(const Graph& g, std::span<const double> f) {
  require(f.size() == g.vertex_count(), "rayleigh: length mismatch");
  CompensatedSum num, den;
  for (auto [u, v] : g.edges()) {
    const double diff = f[u] - f[v];
    num.add(diff * diff);
  }
  for (Vertex v = 0; v < f.size(); ++v) den.add(static_cast<double>(g.degree(v)) * f[v] * f[v]);
  require(den.value() > 0.0, "rayleigh: function vanishes on non-isolated vertices");
  return num.value() / den.value();
}

std::vector<double> BumpResult::dense(std::size_t i, std::size_t n) const {
  std::vector<double> f(n, 0.0);
  for (auto [v, x] : bumps.at(i).values) f[v] = x;
  return f;
}

BumpResult ball_carving_bumps(const WeightedGraphMetric& m, double R, std::size_t K) {
  require(R > 0.0, "ball_carving_bumps: R must be positive");
  require(K >= 1, "ball_carving_bumps: K must be >= 1");
  const Graph& g = m.graph();
  const std::size_t n = g.vertex_count();
  BumpResult res;
  res.R = R;
  res.K = K;
  std::vector<char> carved(n, 0), blocked(n, 0);
  std::vector<double> fval(n, 0.0);

  for (Vertex x = 0; x < n; ++x) {
    if (carved[x]) continue;
    const auto ball = m.ball_with_distances(x, R / 2.0);
    Bump b;
    b.center = x;
    bool conflict = false;
    for (auto [y, dy] : ball) {
      if (dy < R / 4.0) {
        b.values.emplace_back(y, 1.0 - 4.0 * dy / R);
        conflict = conflict || blocked[y];
      }
    }
    if (conflict) {
      ++res.skipped;
      carved[x] = 1;
      continue;
    }
    for (auto [y, fy] : b.values) fval[y] = fy;
    double num = 0.0, lip = 0.0, den = 0.0;
    for (auto [y, fy] : b.values) {
      den += static_cast<double>(g.degree(y)) * fy * fy;
      for (Vertex w : g.neighbors(y)) {
        if (fval[w] > 0.0 && w < y) continue;
        const double diff = fy - fval[w];
        const double len = m.edge_length(y, w);
        num += diff * diff;
        lip += len * len;
      }
    }
    for (auto [y, fy] : b.values) fval[y] = 0.0;
    b.rayleigh = den > 0.0 ? num / den : 0.0;
    b.lipschitz_bound = den > 0.0 ? 16.0 / (R * R) * lip / den : kInf;
    res.max_rayleigh = std::max(res.max_rayleigh, b.rayleigh);
    for (auto [y, fy] : b.values) {
      blocked[y] = 1;
      for (Vertex w : g.neighbors(y)) blocked[w] = 1;
    }
    for (auto [y, dy] : ball) carved[y] = 1;
    res.bumps.push_back(std::move(b));
  }
  return res;
}

namespace {

std::vector<HeatPoint> heat_propagation(const Graph& g, Vertex x, std::size_t T) {
  const std::size_t n = g.vertex_count();
  std::vector<double> cur(n, 0.0), next(n, 0.0);
  cur[x] = 1.0;
  std::vector<HeatPoint> out;
  for (std::size_t step = 1; step <= 2 * T; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (Vertex z = 0; z < n; ++z) {
      if (cur[z] == 0.0) continue;
      const double share = cur[z] / static_cast<double>(g.degree(z));
      for (Vertex y : g.neighbors(z)) next[y] += share;
    }
    std::swap(cur, next);
    if (step % 2 == 0) out.push_back({step / 2, cur[x], 0.0, false});
  }
  return out;
}

std::vector<HeatPoint> heat_spectral(const Graph& g, Vertex x, std::size_t T, std::size_t cap) {
  require_no_isolated(g, cap);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric_walk_matrix(g));
  require(es.info() == Eigen::Success, "heat_kernel: eigensolver did not converge");
  const auto& mu = es.eigenvalues();
  const auto& vec = es.eigenvectors();
  // P^s(x,x) = S^s(x,x) = sum_k mu_k^s phi_k(x)^2
  std::vector<double> mu2(mu.size()), w(mu.size());
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    mu2[k] = mu(k) * mu(k);
    w[k] = vec(x, k) * vec(x, k);
  }
  std::vector<HeatPoint> out;
  std::vector<double> pw(mu.size(), 1.0);
  for (std::size_t t = 1; t <= T; ++t) {
    CompensatedSum s;
    for (std::size_t k = 0; k < pw.size(); ++k) {
      pw[k] *= mu2[k];
      s.add(pw[k] * w[k]);
    }
    out.push_back({t, s.value(), 0.0, false});
  }
  return out;
}

std::vector<HeatPoint> heat_monte_carlo(const Graph& g, Vertex x, std::size_t T,
                                        std::size_t walks, std::uint64_t seed) {
  require(walks >= 1, "heat_kernel: walks must be >= 1");
  require(g.degree(x) > 0, "heat_kernel: start vertex is isolated");
  constexpr std::size_t kStreams = 64;
  std::vector<std::vector<std::size_t>> hits(kStreams, std::vector<std::size_t>(T + 1, 0));
  parallel_for(kStreams, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(c)};
      std::mt19937_64 rng(sq);
      const std::size_t count = walks / kStreams + (c < walks % kStreams ? 1 : 0);
      for (std::size_t w = 0; w < count; ++w) {
        Vertex cur = x;
        for (std::size_t step = 1; step <= 2 * T; ++step) {
          const auto nb = g.neighbors(cur);
          cur = nb[to_bounded(rng(), nb.size())];
          if (step % 2 == 0 && cur == x) ++hits[c][step / 2];
        }
      }
    }
  });
  std::vector<HeatPoint> out;
  const double N = static_cast<double>(walks);
  for (std::size_t t = 1; t <= T; ++t) {
    std::size_t h = 0;
    for (const auto& row : hits) h += row[t];
    const double p = static_cast<double>(h) / N;
    out.push_back({t, p, std::sqrt(p * (1.0 - p) / N), h == 0});
  }
  return out;
}

}  // namespace

std::vector<HeatPoint> heat_kernel(const Graph& g, Vertex x, std::size_t T, const HeatOptions& opt) {
  require(T >= 1, "heat_kernel: T must be >= 1");
  require(x < g.vertex_count(), "heat_kernel: vertex out of range");
  HeatMethod method = opt.method;
  if (method == HeatMethod::Auto)
    method = g.vertex_count() <= opt.cap ? HeatMethod::Spectral : HeatMethod::MonteCarlo;
  switch (method) {
    case HeatMethod::Propagation:
      require(g.degree(x) > 0, "heat_kernel: start vertex is isolated");
      return heat_propagation(g, x, T);
    case HeatMethod::Spectral:
      return heat_spectral(g, x, T, opt.cap);
    case HeatMethod::MonteCarlo:
      require(opt.seed.has_value(), "heat_kernel: Monte Carlo requires a seed");
      return heat_monte_carlo(g, x, T, opt.walks, *opt.seed);
    case HeatMethod::Auto:
      break;
  }
  throw InvalidArgument("heat_kernel: unknown method");
}

DimensionFit spectral_dim_fit(std::span<const HeatPoint> series, std::size_t t_lo,
                              std::size_t t_hi) {
  require(t_lo >= 1 && t_lo < t_hi, "spectral_dim_fit: need 1 <= t_lo < t_hi");
  DimensionFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& h : series) {
    if (h.t < t_lo || h.t > t_hi) continue;
    if (!(h.p > 0.0)) {
      fit.excluded.push_back(h.t);
      continue;
    }
    const double x = std::log(static_cast<double>(h.t));
    const double y = -2.0 * std::log(h.p);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.used;
  }
  require(fit.used >= 2, "spectral_dim_fit: fewer than two usable points in the window");
  const double m = static_cast<double>(fit.used);
  fit.dimension = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

}  // namespace confpack
