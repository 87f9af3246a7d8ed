#pragma once

// Path metric of a vertex weight: edge {u,v} has length (w(u) + w(v)) / 2.

#include <cstdint>
#include <vector>

#include "confpack/graph.hpp"

namespace confpack {

class WeightedGraphMetric {
 public:
  /// `g` must outlive the metric.
  WeightedGraphMetric(const Graph& g, std::vector<double> omega);

  const Graph& graph() const { return *g_; }
  const std::vector<double>& omega() const { return omega_; }
  double edge_length(Vertex u, Vertex v) const { return 0.5 * (omega_[u] + omega_[v]); }

  /// Single-source distances; unreachable vertices get +inf.
  std::vector<double> dist(Vertex src) const;
  /// Distances to the nearest source.
  std::vector<double> dist(std::span<const Vertex> sources) const;

  /// Closed ball {y : dist(x, y) <= R}, sorted.
  std::vector<Vertex> ball(Vertex x, double R) const;
  /// Pairs (vertex, distance) of the closed ball, in settle order.
  std::vector<std::pair<Vertex, double>> ball_with_distances(Vertex x, double R) const;

  /// max over pairs of U of dist; +inf if U spans two components.
  double subset_diam(std::span<const Vertex> U) const;

 private:
  const Graph* g_;
  std::vector<double> omega_;
};

struct GrowthEntry {
  double R = 0.0;
  std::size_t max_ball = 0;
  Vertex argmax = 0;
  double const_poly = 0.0;     // max_ball / R^d*
  double const_polylog = 0.0;  // max_ball / (R^d* log^2(2 + R))
};

struct GrowthReport {
  int d_star = 2;
  std::vector<GrowthEntry> entries;
  std::size_t roots_sampled = 0;
  bool sampled = false;  // false when every vertex served as a root

  double max_const_poly() const;
  double max_const_polylog() const;
};

/// All vertices when n <= all_threshold, else `count` seeded uniform roots
/// plus the maximum-degree vertex.
std::vector<Vertex> sample_roots(const Graph& g, std::uint64_t seed,
                                 std::size_t all_threshold = 4096, std::size_t count = 64);

/// Geometric grid 2^(j/2), j = 0, 1, ..., ending at the first value >= upper.
std::vector<double> radii_grid(double upper);

GrowthReport growth_profile(const WeightedGraphMetric& m, std::span<const double> radii,
                            std::span<const Vertex> roots, int d_star);

/// Largest distance from any root to any reachable vertex.
double max_eccentricity(const WeightedGraphMetric& m, std::span<const Vertex> roots);

}  // namespace confpack
