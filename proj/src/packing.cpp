#include "confpack/packing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace confpack {

double body_distance(const Body& a, const Body& b, MetricKind metric) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.center.size(); ++j) {
    const double t = std::abs(a.center[j] - b.center[j]);
    acc = metric == MetricKind::Linf ? std::max(acc, t) : acc + t * t;
  }
  const double centers = metric == MetricKind::Linf ? acc : std::sqrt(acc);
  return std::max(0.0, centers - a.radius - b.radius);
}

std::vector<Point> QuasiPackedGraph::representatives() const {
  std::vector<Point> pts;
  pts.reserve(bodies.size());
  for (const auto& b : bodies) pts.push_back(b.center);
  return pts;
}

namespace {

PackingInstance assemble(AmbientSpace space, double tau, double mult, std::vector<Body> bodies,
                         const std::vector<Edge>& edges) {
  PackingInstance inst;
  inst.packing.space = space;
  inst.packing.tau = tau;
  inst.packing.bodies = bodies;
  inst.graph.space = space;
  inst.graph.tau = tau;
  inst.graph.multiplicity = mult;
  inst.graph.graph = Graph(bodies.size(), edges);
  inst.graph.bodies = std::move(bodies);
  return inst;
}

}  // namespace

PackingInstance gen_grid(int d, int m, MetricKind metric, std::size_t size_cap) {
  require(d >= 1 && d <= kMaxDim, "gen_grid: dimension out of range");
  require(m >= 2, "gen_grid: side length must be >= 2");
  std::size_t n = 1;
  for (int j = 0; j < d; ++j) {
    require(n <= size_cap / static_cast<std::size_t>(m),
            "gen_grid: m^d exceeds the size cap " + std::to_string(size_cap));
    n *= static_cast<std::size_t>(m);
  }
  std::vector<Body> bodies(n);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(d) * n);
  for (std::size_t v = 0; v < n; ++v) {
    bodies[v].id = static_cast<std::int64_t>(v);
    bodies[v].radius = 0.5;
    bodies[v].center.resize(d);
    std::size_t rest = v, stride = 1;
    for (int j = 0; j < d; ++j) {
      const std::size_t coord = rest % m;
      rest /= m;
      bodies[v].center[j] = static_cast<double>(coord + 1);
      if (coord + 1 < static_cast<std::size_t>(m))
        edges.emplace_back(static_cast<Vertex>(v), static_cast<Vertex>(v + stride));
      stride *= m;
    }
  }
  return assemble(AmbientSpace(d, metric), 1.0, 1.0, std::move(bodies), edges);
}

namespace {

struct CellHash {
  std::size_t operator()(const std::vector<std::int64_t>& c) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : c) h = (h ^ static_cast<std::uint64_t>(x)) * 1099511628211ULL;
    return static_cast<std::size_t>(h);
  }
};

// Large sweeps over neighbor cells: enumerate offsets in {-1,0,1}^d.
template <class F>
void for_each_neighbor_cell(const std::vector<std::int64_t>& cell, F&& f) {
  const int d = static_cast<int>(cell.size());
  int total = 1;
  for (int j = 0; j < d; ++j) total *= 3;
  std::vector<std::int64_t> probe(cell.size());
  for (int code = 0; code < total; ++code) {
    int c = code;
    for (int j = 0; j < d; ++j) {
      probe[j] = cell[j] + (c % 3) - 1;
      c /= 3;
    }
    f(probe);
  }
}

}  // namespace

PackingInstance gen_rsa(const RsaOptions& opt) {
  const int d = opt.dimension;
  require(d >= 1 && d <= kMaxDim, "gen_rsa: dimension out of range");
  require(opt.count >= 1, "gen_rsa: count must be >= 1");
  require(opt.radius_min > 0 && opt.radius_min <= opt.radius_max,
          "gen_rsa: radius range must satisfy 0 < r_min <= r_max");
  require(opt.tau >= 1, "gen_rsa: tau must be >= 1");

  const AmbientSpace space(d, opt.metric);
  double side = 0.0;
  if (opt.box_side) {
    side = *opt.box_side;
    require(side > 0, "gen_rsa: box side must be positive");
  } else {
    // Expected r^d under the log-uniform radius law; size the box for ~35% fill.
    double mean_rd = std::pow(opt.radius_min, d);
    if (opt.radius_max > opt.radius_min)
      mean_rd = (std::pow(opt.radius_max, d) - std::pow(opt.radius_min, d)) /
                (d * std::log(opt.radius_max / opt.radius_min));
    const double vol = unit_ball_volume(d, opt.metric) * mean_rd * static_cast<double>(opt.count);
    side = std::max(2.0 * opt.radius_max, std::pow(vol / 0.35, 1.0 / d));
  }

  std::mt19937_64 rng(opt.seed);
  const double cell = 2.0 * opt.radius_max;
  const double log_lo = std::log(opt.radius_min), log_hi = std::log(opt.radius_max);
  std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, CellHash> grid;
  std::vector<Body> bodies;
  const std::size_t budget = opt.attempts_per_body * opt.count;
  std::vector<std::int64_t> key(d);
  Body cand;
  cand.center.resize(d);
  std::size_t attempts = 0;
  while (bodies.size() < opt.count && attempts < budget) {
    ++attempts;
    for (int j = 0; j < d; ++j) cand.center[j] = side * to_unit(rng());
    const double u = to_unit(rng());
    cand.radius = opt.radius_max > opt.radius_min ? std::exp(log_lo + u * (log_hi - log_lo))
                                                  : opt.radius_min;
    for (int j = 0; j < d; ++j) key[j] = static_cast<std::int64_t>(std::floor(cand.center[j] / cell));
    bool ok = true;
    for_each_neighbor_cell(key, [&](const std::vector<std::int64_t>& probe) {
      if (!ok) return;
      auto it = grid.find(probe);
      if (it == grid.end()) return;
      for (std::size_t b : it->second) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) {
          const double t = std::abs(cand.center[j] - bodies[b].center[j]);
          acc = opt.metric == MetricKind::Linf ? std::max(acc, t) : acc + t * t;
        }
        const double centers = opt.metric == MetricKind::Linf ? acc : std::sqrt(acc);
        if (centers < cand.radius + bodies[b].radius) {
          ok = false;
          return;
        }
      }
    });
    if (!ok) continue;
    cand.id = static_cast<std::int64_t>(bodies.size());
    grid[key].push_back(bodies.size());
    bodies.push_back(cand);
  }

  SpherePacking packing{space, opt.tau, bodies};
  PackingInstance inst;
  inst.packing = packing;
  inst.graph = largest_component(extract_graph(packing, opt.tau));
  // Balls of a packing in R^d: point multiplicity 1, so M is bounded by the
  // round-body constant with s = 1, alpha = 1.
  inst.graph.multiplicity = quasi_mult_bound(1.0, 1.0, std::ldexp(1.0, -d), 1.0, 1.0, d);
  if (bodies.size() < opt.count) {
    inst.partial = true;
    inst.warning = "rejection budget exhausted: placed " + std::to_string(bodies.size()) + " of " +
                   std::to_string(opt.count) + " bodies";
  }
  return inst;
}

PackingInstance gen_accumulation(int d, int levels, MetricKind metric) {
  require(d >= 1 && d <= kMaxDim, "gen_accumulation: dimension out of range");
  require(levels >= 1, "gen_accumulation: levels must be >= 1");
  require(d == 1 || metric == MetricKind::L2, "gen_accumulation: d >= 2 requires the l2 metric");
  std::vector<Body> bodies;
  std::vector<Edge> edges;
  auto add = [&](Point c, double r) {
    Body b;
    b.id = static_cast<std::int64_t>(bodies.size());
    b.center = std::move(c);
    b.radius = r;
    bodies.push_back(std::move(b));
    return static_cast<Vertex>(bodies.size() - 1);
  };

  if (d == 1) {
    double c = 0.0;
    for (int j = 0; j <= levels; ++j) {
      const double r = std::ldexp(1.0, -j);
      if (j > 0) c += std::ldexp(1.0, -(j - 1)) + r;
      const Vertex v = add(Point{c}, r);
      if (j > 0) edges.emplace_back(v - 1, v);
    }
    return assemble(AmbientSpace(d, metric), 1.0, 1.0, std::move(bodies), edges);
  }

  // Ring j: nine bodies of radius 2^-j on a circle of radius 2^-j / sin(pi/9),
  // rotated by pi/9 relative to its neighbors so consecutive rings interlock.
  constexpr int kRing = 9;
  const double spread = 1.0 / std::sin(std::numbers::pi / kRing);
  std::vector<Vertex> prev;
  double last_ring_radius = 0.0, last_body_radius = 0.0;
  for (int j = 0; j < levels; ++j) {
    const double r = std::ldexp(1.0, -j);
    const double ring = r * spread;
    std::vector<Vertex> cur;
    for (int i = 0; i < kRing; ++i) {
      const double angle = std::numbers::pi * (2.0 * i + j) / kRing;
      Point c(d, 0.0);
      c[0] = ring * std::cos(angle);
      c[1] = ring * std::sin(angle);
      cur.push_back(add(std::move(c), r));
    }
    for (int i = 0; i < kRing; ++i) edges.emplace_back(cur[i], cur[(i + 1) % kRing]);
    if (!prev.empty()) {
      for (int i = 0; i < kRing; ++i) {
        edges.emplace_back(prev[i], cur[i]);
        edges.emplace_back(prev[i], cur[(i + kRing - 1) % kRing]);
      }
    }
    prev = std::move(cur);
    last_ring_radius = ring;
    last_body_radius = r;
  }
  const Vertex hub = add(Point(d, 0.0), last_ring_radius - last_body_radius);
  for (Vertex v : prev) edges.emplace_back(v, hub);
  return assemble(AmbientSpace(d, metric), 1.0, 1.0, std::move(bodies), edges);
}

std::size_t star_leaf_cap(int d, double leaf_radius) {
  require(leaf_radius > 0, "star: leaf radius must be positive");
  if (d == 1) return 2;
  const double s = leaf_radius / (1.0 + leaf_radius);
  return static_cast<std::size_t>(std::floor(std::numbers::pi / std::asin(std::min(1.0, s)) + 1e-9));
}

PackingInstance gen_star(int d, std::size_t leaves, std::optional<double> leaf_radius,
                         MetricKind metric) {
  require(d >= 1 && d <= kMaxDim, "gen_star: dimension out of range");
  require(leaves >= 1, "gen_star: leaves must be >= 1");
  require(d == 1 || metric == MetricKind::L2, "gen_star: d >= 2 requires the l2 metric");
  double eps = 0.1;
  if (leaf_radius) {
    eps = *leaf_radius;
  } else if (d >= 2 && leaves >= 3) {
    const double s = std::sin(std::numbers::pi / static_cast<double>(leaves));
    eps = std::min(0.1, 0.9 * s / (1.0 - s));
  }
  const std::size_t cap = star_leaf_cap(d, eps);
  if (leaves > cap)
    throw InvalidArgument("gen_star: " + std::to_string(leaves) + " leaves of radius " +
                          std::to_string(eps) + " exceed the cap of " + std::to_string(cap));

  std::vector<Body> bodies;
  std::vector<Edge> edges;
  Body hub;
  hub.id = 0;
  hub.center.assign(d, 0.0);
  hub.radius = 1.0;
  bodies.push_back(hub);
  for (std::size_t i = 0; i < leaves; ++i) {
    Body b;
    b.id = static_cast<std::int64_t>(i + 1);
    b.center.assign(d, 0.0);
    b.radius = eps;
    if (d == 1) {
      b.center[0] = (i == 0 ? 1.0 : -1.0) * (1.0 + eps);
    } else {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(leaves);
      b.center[0] = (1.0 + eps) * std::cos(angle);
      b.center[1] = (1.0 + eps) * std::sin(angle);
    }
    bodies.push_back(std::move(b));
    edges.emplace_back(0, static_cast<Vertex>(i + 1));
  }
  return assemble(AmbientSpace(d, metric), 1.0, 1.0, std::move(bodies), edges);
}

QuasiPackedGraph extract_graph(const SpherePacking& packing, double tau, ContactRule rule) {
  require(tau >= 1, "extract_graph: tau must be >= 1");
  const auto& bodies = packing.bodies;
  const std::size_t n = bodies.size();
  const MetricKind metric = packing.space.metric;
  const double factor = rule == ContactRule::QuasiTangent ? tau : 1e-9;
  double r_max = 0.0;
  for (const auto& b : bodies) r_max = std::max(r_max, b.radius);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return bodies[a].center[0] < bodies[b].center[0];
  });
  std::vector<Edge> edges;
  for (std::size_t ia = 0; ia < n; ++ia) {
    const Body& u = bodies[order[ia]];
    const double reach = (1.0 + 2.0 * factor) * u.radius + r_max;
    for (std::size_t ib = ia + 1; ib < n; ++ib) {
      const Body& v = bodies[order[ib]];
      if (v.center[0] - u.center[0] > reach) break;
      const double gap = body_distance(u, v, metric);
      if (gap <= factor * std::min(u.diameter(), v.diameter()))
        edges.emplace_back(static_cast<Vertex>(order[ia]), static_cast<Vertex>(order[ib]));
    }
  }
  QuasiPackedGraph g;
  g.space = packing.space;
  g.tau = tau;
  g.bodies = bodies;
  g.graph = Graph(n, edges);
  return g;
}

QuasiPackedGraph largest_component(const QuasiPackedGraph& g) {
  auto [label, count] = g.graph.components();
  if (count <= 1) return g;
  std::vector<std::size_t> size(count, 0);
  for (auto l : label) ++size[l];
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(size.begin(), size.end()) - size.begin());
  std::vector<Vertex> keep;
  for (Vertex v = 0; v < label.size(); ++v)
    if (label[v] == best) keep.push_back(v);
  QuasiPackedGraph out;
  out.space = g.space;
  out.tau = g.tau;
  out.multiplicity = g.multiplicity;
  out.graph = g.graph.induced(keep);
  for (Vertex v : keep) out.bodies.push_back(g.bodies[v]);
  return out;
}

namespace {

bool contains(const Body& b, std::span<const double> x, MetricKind metric) {
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double t = std::abs(x[j] - b.center[j]);
    acc = metric == MetricKind::Linf ? std::max(acc, t) : acc + t * t;
  }
  const double dist = metric == MetricKind::Linf ? acc : std::sqrt(acc);
  return dist <= b.radius * (1.0 + 1e-9);
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (n <= cap) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
  }
  for (std::size_t i = 0; i < cap; ++i) idx.push_back(i * (n - 1) / (cap - 1));
  return idx;
}

}  // namespace

ValidationReport validate(const QuasiPackedGraph& g, const ValidationOptions& opt) {
  ValidationReport rep;
  const MetricKind metric = g.space.metric;
  const auto& bodies = g.bodies;
  const std::size_t n = bodies.size();

  for (auto [u, v] : g.graph.edges()) {
    ++rep.edges_checked;
    const double gap = body_distance(bodies[u], bodies[v], metric);
    const double allowed = g.tau * std::min(bodies[u].diameter(), bodies[v].diameter());
    if (gap > allowed * (1.0 + 1e-9) + 1e-12) rep.tangency_violations.emplace_back(u, v);
  }

  // Point multiplicity at body centers and at interior witnesses of every
  // strictly overlapping pair.
  std::vector<Point> probes;
  probes.reserve(n);
  for (const auto& b : bodies) probes.push_back(b.center);
  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return bodies[a].center[0] < bodies[b].center[0];
    });
    double r_max = 0.0;
    for (const auto& b : bodies) r_max = std::max(r_max, b.radius);
    for (std::size_t ia = 0; ia < n; ++ia) {
      const Body& u = bodies[order[ia]];
      for (std::size_t ib = ia + 1; ib < n; ++ib) {
        const Body& v = bodies[order[ib]];
        if (v.center[0] - u.center[0] > u.radius + r_max) break;
        double acc = 0.0;
        for (std::size_t j = 0; j < u.center.size(); ++j) {
          const double t = std::abs(u.center[j] - v.center[j]);
          acc = metric == MetricKind::Linf ? std::max(acc, t) : acc + t * t;
        }
        const double centers = metric == MetricKind::Linf ? acc : std::sqrt(acc);
        const double overlap = u.radius + v.radius - centers;
        if (overlap <= 1e-9 * std::min(u.radius, v.radius)) continue;
        // Midpoint of the overlap along the center line.
        const double t = centers > 0 ? (u.radius - overlap / 2.0) / centers : 0.0;
        Point w(u.center.size());
        for (std::size_t j = 0; j < w.size(); ++j) w[j] = u.center[j] + t * (v.center[j] - u.center[j]);
        probes.push_back(std::move(w));
      }
    }
  }
  rep.multiplicity_probes = probes.size();
  std::vector<std::size_t> mult(probes.size(), 0);
  parallel_for(probes.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p)
      for (const auto& body : bodies)
        if (contains(body, probes[p], metric)) ++mult[p];
  });
  for (auto m : mult) rep.point_multiplicity_max = std::max(rep.point_multiplicity_max, m);

  // Structured sample of the quasi-multiplicity condition: x over centers,
  // r over the radii {diam(S_w) / tau}.
  std::vector<double> radii;
  for (const auto& b : bodies) radii.push_back(b.diameter() / g.tau);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  const auto centers_idx = sample_indices(n, opt.max_centers);
  const auto radii_idx = sample_indices(radii.size(), opt.max_radii);
  rep.sampled = centers_idx.size() < n || radii_idx.size() < radii.size();
  rep.quasi_probes = centers_idx.size() * radii_idx.size();
  std::vector<std::size_t> best(centers_idx.size(), 0);
  parallel_for(centers_idx.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t ci = b; ci < e; ++ci) {
      const Body x{0, bodies[centers_idx[ci]].center, 0.0};
      for (std::size_t ri : radii_idx) {
        const double r = radii[ri];
        std::size_t count = 0;
        for (const auto& body : bodies)
          if (body.diameter() >= g.tau * r * (1.0 - 1e-12) &&
              body_distance(x, body, metric) <= r * (1.0 + 1e-12))
            ++count;
        best[ci] = std::max(best[ci], count);
      }
    }
  });
  for (auto c : best) rep.sampled_quasi_multiplicity_max = std::max(rep.sampled_quasi_multiplicity_max, c);

  if (!rep.tangency_violations.empty()) {
    std::ostringstream msg;
    msg << "quasi-tangency violated on " << rep.tangency_violations.size() << " edge(s):";
    std::size_t shown = 0;
    for (auto [u, v] : rep.tangency_violations) {
      if (shown++ == 20) {
        msg << " ...";
        break;
      }
      msg << " {" << u << "," << v << "}";
    }
    throw ValidationFailure(msg.str(), rep);
  }
  return rep;
}

double quasi_mult_bound(double c1, double c2, double eta, double s, double alpha, int d) {
  require(c1 > 0 && c2 > 0 && eta > 0 && s > 0 && alpha >= 0 && d >= 1,
          "quasi_mult_bound: arguments must be positive");
  return s * c2 / (c1 * eta) * std::pow(1.0 + 2.0 * alpha, d);
}

}  // namespace confpack
