#include "confpack/wgraph.hpp"

#include <algorithm>
#include <queue>
#include <random>

namespace confpack {

namespace {

using HeapItem = std::pair<double, Vertex>;
using MinHeap = std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>>;

}  // namespace

WeightedGraphMetric::WeightedGraphMetric(const Graph& g, std::vector<double> omega)
    : g_(&g), omega_(std::move(omega)) {
  require(omega_.size() == g.vertex_count(), "weight length does not match vertex count");
  for (double w : omega_) require(w >= 0.0 && std::isfinite(w), "weights must be finite and >= 0");
}

std::vector<double> WeightedGraphMetric::dist(Vertex src) const {
  const Vertex s[] = {src};
  return dist(s);
}

std::vector<double> WeightedGraphMetric::dist(std::span<const Vertex> sources) const {
  std::vector<double> d(g_->vertex_count(), kInf);
  MinHeap heap;
  for (Vertex s : sources) {
    require(s < d.size(), "source vertex out of range");
    d[s] = 0.0;
    heap.emplace(0.0, s);
  }
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > d[u]) continue;
    for (Vertex w : g_->neighbors(u)) {
      const double nd = du + edge_length(u, w);
      if (nd < d[w]) {
        d[w] = nd;
        heap.emplace(nd, w);
      }
    }
  }
  return d;
}

std::vector<std::pair<Vertex, double>> WeightedGraphMetric::ball_with_distances(Vertex x,
                                                                                double R) const {
  require(x < g_->vertex_count(), "vertex out of range");
  std::vector<std::pair<Vertex, double>> out;
  std::vector<double> d(g_->vertex_count(), kInf);
  std::vector<char> done(g_->vertex_count(), 0);
  MinHeap heap;
  d[x] = 0.0;
  heap.emplace(0.0, x);
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    if (du > R) break;
    done[u] = 1;
    out.emplace_back(u, du);
    for (Vertex w : g_->neighbors(u)) {
      const double nd = du + edge_length(u, w);
      if (nd < d[w]) {
        d[w] = nd;
        heap.emplace(nd, w);
      }
    }
  }
  return out;
}

std::vector<Vertex> WeightedGraphMetric::ball(Vertex x, double R) const {
  std::vector<Vertex> out;
  for (auto [v, dv] : ball_with_distances(x, R)) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

double WeightedGraphMetric::subset_diam(std::span<const Vertex> U) const {
  require(!U.empty(), "subset_diam: empty set");
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < U.size(); ++i) {
    const auto d = dist(U[i]);
    for (std::size_t j = i + 1; j < U.size(); ++j) best = std::max(best, d[U[j]]);
  }
  return best;
}

double GrowthReport::max_const_poly() const {
  double c = 0.0;
  for (const auto& e : entries) c = std::max(c, e.const_poly);
  return c;
}

double GrowthReport::max_const_polylog() const {
  double c = 0.0;
  for (const auto& e : entries) c = std::max(c, e.const_polylog);
  return c;
}

std::vector<Vertex> sample_roots(const Graph& g, std::uint64_t seed, std::size_t all_threshold,
                                 std::size_t count) {
  const std::size_t n = g.vertex_count();
  std::vector<Vertex> roots;
  if (n <= all_threshold) {
    roots.resize(n);
    for (std::size_t v = 0; v < n; ++v) roots[v] = static_cast<Vertex>(v);
    return roots;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) roots.push_back(static_cast<Vertex>(to_bounded(rng(), n)));
  Vertex hub = 0;
  for (Vertex v = 1; v < n; ++v)
    if (g.degree(v) > g.degree(hub)) hub = v;
  roots.push_back(hub);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

std::vector<double> radii_grid(double upper) {
  std::vector<double> r;
  for (int j = 0;; ++j) {
    const double R = std::exp2(0.5 * j);
    r.push_back(R);
    if (R >= upper || j > 400) break;
  }
  return r;
}

GrowthReport growth_profile(const WeightedGraphMetric& m, std::span<const double> radii,
                            std::span<const Vertex> roots, int d_star) {
  require(!radii.empty() && !roots.empty(), "growth_profile: empty radii or roots");
  const std::size_t nr = radii.size();
  std::vector<std::vector<std::size_t>> best(roots.size(), std::vector<std::size_t>(nr, 0));
  parallel_for(roots.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      auto d = m.dist(roots[i]);
      std::sort(d.begin(), d.end());
      for (std::size_t j = 0; j < nr; ++j)
        best[i][j] = static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), radii[j]) - d.begin());
    }
  });

  GrowthReport rep;
  rep.d_star = d_star;
  rep.roots_sampled = roots.size();
  rep.sampled = roots.size() < m.graph().vertex_count();
  for (std::size_t j = 0; j < nr; ++j) {
    GrowthEntry e;
    e.R = radii[j];
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (best[i][j] > e.max_ball) {
        e.max_ball = best[i][j];
        e.argmax = roots[i];
      }
    }
    const double poly = std::pow(e.R, d_star);
    const double lg = std::log(2.0 + e.R);
    e.const_poly = static_cast<double>(e.max_ball) / poly;
    e.const_polylog = static_cast<double>(e.max_ball) / (poly * lg * lg);
    rep.entries.push_back(e);
  }
  return rep;
}

double max_eccentricity(const WeightedGraphMetric& m, std::span<const Vertex> roots) {
  std::vector<double> ecc(roots.size(), 0.0);
  parallel_for(roots.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (double x : m.dist(roots[i]))
        if (std::isfinite(x)) ecc[i] = std::max(ecc[i], x);
  });
  return ecc.empty() ? 0.0 : *std::max_element(ecc.begin(), ecc.end());
}

}  // namespace confpack
