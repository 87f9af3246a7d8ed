#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "confpack/ambient.hpp"
#include "confpack/graph.hpp"

namespace confpack {

struct Body {
  std::int64_t id = 0;
  Point center;
  double radius = 0.0;

  double diameter() const { return 2.0 * radius; }
};

struct SpherePacking {
  AmbientSpace space;
  double tau = 1.0;
  std::vector<Body> bodies;
};

/// Set distance between two balls in the ambient metric.
double body_distance(const Body& a, const Body& b, MetricKind metric);

/// A finite graph together with its body assignment. Vertex v owns bodies[v],
/// and its representative point is bodies[v].center.
struct QuasiPackedGraph {
  AmbientSpace space;
  Graph graph;
  std::vector<Body> bodies;
  double tau = 1.0;
  double multiplicity = 1.0;  // declared M

  std::size_t vertex_count() const { return bodies.size(); }
  std::vector<Point> representatives() const;
};

struct PackingInstance {
  SpherePacking packing;
  QuasiPackedGraph graph;
  bool partial = false;  // rejection budget ran out before reaching the requested count
  std::string warning;
};

inline constexpr std::size_t kDefaultSizeCap = std::size_t{1} << 22;

PackingInstance gen_grid(int d, int m, MetricKind metric = MetricKind::Linf,
                         std::size_t size_cap = kDefaultSizeCap);

struct RsaOptions {
  int dimension = 2;
  std::size_t count = 200;
  double radius_min = 0.1;
  double radius_max = 1.0;
  std::uint64_t seed = 0;
  double tau = 1.0;
  MetricKind metric = MetricKind::Linf;
  std::optional<double> box_side;      // default derived from count and radii
  std::size_t attempts_per_body = 2000;
};

/// Random sequential adsorption; the graph is the largest connected component
/// of the quasi-tangency graph at the given tau.
PackingInstance gen_rsa(const RsaOptions& opt);

/// Rings of nine bodies with radii 2^-j shrinking toward the origin (d >= 2),
/// or a chain of radii 1, 1/2, ..., 2^-levels (d = 1). Round placements need
/// the l2 metric when d >= 2.
PackingInstance gen_accumulation(int d, int levels, MetricKind metric = MetricKind::L2);

/// Largest number of radius-eps leaves that fit around a unit ball.
std::size_t star_leaf_cap(int d, double leaf_radius);

/// Unit ball plus `leaves` equal tangent leaves on a great circle; l2 only
/// when d >= 2.
PackingInstance gen_star(int d, std::size_t leaves, std::optional<double> leaf_radius = std::nullopt,
                         MetricKind metric = MetricKind::L2);

enum class ContactRule {
  QuasiTangent,  // dist(S_u, S_v) <= tau * min(diam S_u, diam S_v)
  Tangent,       // dist(S_u, S_v) <= 1e-9 * min(diam)
};

QuasiPackedGraph extract_graph(const SpherePacking& packing, double tau,
                               ContactRule rule = ContactRule::QuasiTangent);

/// Keeps the largest connected component (ties: the one with the smallest vertex).
QuasiPackedGraph largest_component(const QuasiPackedGraph& g);

struct ValidationReport {
  std::size_t edges_checked = 0;
  std::vector<Edge> tangency_violations;
  std::size_t point_multiplicity_max = 0;
  std::size_t sampled_quasi_multiplicity_max = 0;
  std::size_t multiplicity_probes = 0;
  std::size_t quasi_probes = 0;
  bool sampled = false;  // true when centers or radii were subsampled
};

class ValidationFailure : public std::runtime_error {
 public:
  ValidationFailure(const std::string& what, ValidationReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct ValidationOptions {
  std::size_t max_centers = 512;
  std::size_t max_radii = 64;
};

/// Throws ValidationFailure if any edge violates quasi-tangency.
ValidationReport validate(const QuasiPackedGraph& g, const ValidationOptions& opt = {});

/// Closed-form bound s * c2 / (c1 * eta) * (1 + 2 alpha)^d on the number of
/// disjoint eta-round bodies near a point.
double quasi_mult_bound(double c1, double c2, double eta, double s, double alpha, int d);

}  // namespace confpack
