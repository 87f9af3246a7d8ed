#include "confpack/extremal.hpp"

#include <algorithm>
#include <queue>

#include "confpack/wgraph.hpp"

namespace confpack {

void check_spec(const Graph& g, const PathFamilySpec& spec) {
  const std::size_t n = g.vertex_count();
  require(!spec.sources.empty(), "path family: source set is empty");
  require(!spec.targets.empty(), "path family: target set is empty");
  std::vector<char> in_a(n, 0);
  for (Vertex a : spec.sources) {
    require(a < n, "path family: source out of range");
    in_a[a] = 1;
  }
  for (Vertex b : spec.targets) {
    require(b < n, "path family: target out of range");
    require(!in_a[b], "path family: sources and targets overlap at vertex " + std::to_string(b));
  }
  const std::vector<double> ones(n, 1.0);
  require(std::isfinite(shortest_path(g, spec, ones).length), "path family: no path from A to B");
}

PathFamilySpec boundary_spec(const Graph& g, Vertex v0) {
  const auto hop = g.hop_distances(v0);
  std::size_t far = 0;
  for (auto h : hop)
    if (h != std::numeric_limits<std::size_t>::max()) far = std::max(far, h);
  require(far > 0, "boundary_spec: the root has no other reachable vertex");
  PathFamilySpec s;
  s.sources = {v0};
  for (Vertex v = 0; v < hop.size(); ++v)
    if (hop[v] == far) s.targets.push_back(v);
  return s;
}

double lp_norm(std::span<const double> w, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : w) m = std::max(m, std::abs(x));
    return m;
  }
  double scale = 0.0;
  for (double x : w) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  CompensatedSum s;
  for (double x : w) s.add(std::pow(std::abs(x) / scale, p));
  return scale * std::pow(s.value(), 1.0 / p);
}

ShortestPath shortest_path(const Graph& g, const PathFamilySpec& spec, std::span<const double> w) {
  const std::size_t n = g.vertex_count();
  constexpr Vertex kNone = std::numeric_limits<Vertex>::max();
  std::vector<double> dist(n, kInf);
  std::vector<Vertex> pred(n, kNone);
  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (Vertex a : spec.sources) {
    dist[a] = 0.0;
    heap.emplace(0.0, a);
  }
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    for (Vertex v : g.neighbors(u)) {
      const double nd = du + 0.5 * (w[u] + w[v]);
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
  ShortestPath sp;
  Vertex best = kNone;
  for (Vertex b : spec.targets) {
    if (dist[b] < sp.length || (dist[b] == sp.length && best != kNone && b < best)) {
      sp.length = dist[b];
      best = b;
    }
  }
  if (best == kNone) return sp;
  for (Vertex v = best; v != kNone; v = pred[v]) sp.vertices.push_back(v);
  std::reverse(sp.vertices.begin(), sp.vertices.end());
  return sp;
}

std::vector<double> path_load(std::size_t n, std::span<const Vertex> path) {
  std::vector<double> c(n, 0.0);
  if (path.empty()) return c;
  for (Vertex v : path) c[v] += 1.0;
  c[path.front()] -= 0.5;
  c[path.back()] -= 0.5;
  return c;
}

namespace {

double ratio(const Graph& g, const PathFamilySpec& spec, std::span<const double> w, double d) {
  const double norm = lp_norm(w, d);
  if (!(norm > 0.0)) return 0.0;
  return shortest_path(g, spec, w).length / norm;
}

void normalize(std::vector<double>& w, double d) {
  const double norm = lp_norm(w, d);
  require(norm > 0.0, "weight vanishes identically");
  for (double& x : w) x /= norm;
}

}  // namespace

FlowDual flow_dual_bound(const Graph& g, const PathFamilySpec& spec, double d,
                         std::size_t iterations) {
  require(d >= 1.0, "flow_dual_bound: d must be >= 1");
  check_spec(g, spec);
  const std::size_t n = g.vertex_count();
  const bool sup_norm = d == 1.0;
  const double q = sup_norm ? 64.0 : d / (d - 1.0);
  const double report_q = sup_norm ? kInf : q;

  std::vector<double> load = path_load(n, shortest_path(g, spec, std::vector<double>(n, 1.0)).vertices);
  FlowDual out;
  out.bound = lp_norm(load, report_q);
  out.load = load;
  double best_primal = -1.0;

  std::vector<double> grad(n), mix(n);
  for (std::size_t it = 0; it < iterations; ++it) {
    const double fq = lp_norm(load, q);
    for (std::size_t v = 0; v < n; ++v) grad[v] = std::pow(load[v] / fq, q - 1.0);
    const double cand = ratio(g, spec, grad, d);
    if (cand > best_primal) {
      best_primal = cand;
      out.weight = grad;
    }
    const auto vertex = path_load(n, shortest_path(g, spec, grad).vertices);

    auto phi = [&](double gamma) {
      for (std::size_t v = 0; v < n; ++v) mix[v] = (1.0 - gamma) * load[v] + gamma * vertex[v];
      return lp_norm(mix, q);
    };
    double lo = 0.0, hi = 1.0;
    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
    double f1 = phi(x1), f2 = phi(x2);
    for (int k = 0; k < 60; ++k) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kGolden * (hi - lo);
        f1 = phi(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kGolden * (hi - lo);
        f2 = phi(x2);
      }
    }
    const double gamma = 0.5 * (lo + hi);
    if (phi(gamma) >= fq) {
      out.iterations = it + 1;
      break;
    }
    load = mix;
    const double b = lp_norm(load, report_q);
    if (b < out.bound) {
      out.bound = b;
      out.load = load;
    }
    out.iterations = it + 1;
  }
  if (out.weight.empty()) out.weight = out.load;
  return out;
}

VelResult vel_solve(const Graph& g, const PathFamilySpec& spec, double d, const VelOptions& opt) {
  require(d >= 1.0, "vel_solve: d must be >= 1");
  check_spec(g, spec);
  const std::size_t n = g.vertex_count();
  std::vector<double> w = opt.initial.value_or(std::vector<double>(n, 1.0));
  require(w.size() == n, "vel_solve: initial weight has wrong length");
  for (double x : w) require(x >= 0.0 && std::isfinite(x), "vel_solve: initial weight must be >= 0");
  normalize(w, d);
  const double eta0 = opt.eta0.value_or(std::pow(static_cast<double>(n), -1.0 / d));

  VelResult r;
  r.d = d;
  r.primal = -1.0;
  for (std::size_t t = 1; t <= opt.iterations; ++t) {
    const auto sp = shortest_path(g, spec, w);
    const double val = sp.length / lp_norm(w, d);
    if (val > r.primal) {
      r.primal = val;
      r.omega = w;
    }
    const auto c = path_load(n, sp.vertices);
    const double eta = eta0 / std::sqrt(static_cast<double>(t));
    for (std::size_t v = 0; v < n; ++v) w[v] += eta * c[v];
    normalize(w, d);
    r.iterations = t;
  }

  const auto dual = flow_dual_bound(g, spec, d, opt.dual_iterations);
  const double cand = ratio(g, spec, dual.weight, d);
  if (cand > r.primal) {
    r.primal = cand;
    r.omega = dual.weight;
  }
  normalize(r.omega, d);
  r.value = r.primal;
  r.dual = dual.bound;
  r.gap = r.dual - r.primal;
  r.relative_gap = r.gap / r.dual;
  check_invariant(r.primal <= r.dual * (1.0 + 1e-9),
                  "weak duality violated: primal " + std::to_string(r.primal) + " > dual " +
                      std::to_string(r.dual));
  r.converged = r.relative_gap <= opt.tol;
  return r;
}

std::vector<double> certificate_radii(double c_prime, double eps, std::size_t count) {
  require(c_prime > 1.0, "certificate_radii: C' must exceed 1");
  require(eps > 0.0 && eps < 1.0, "certificate_radii: eps must lie in (0, 1)");
  std::vector<double> r;
  if (count == 0) return r;
  r.push_back(1.0);
  for (std::size_t j = 1; j < count; ++j)
    r.push_back(16.0 * c_prime / eps * std::pow(c_prime, 2.0 * r.back()));
  return r;
}

Certificate parabolicity_certificate(const Graph& g, std::span<const ScaleWeight> weights,
                                     Vertex z, double c_prime, double d) {
  require(!weights.empty(), "certificate: need at least one scale");
  require(c_prime > 1.0, "certificate: C' must exceed 1");
  require(d >= 1.0, "certificate: d must be >= 1");
  const std::size_t n = g.vertex_count();
  require(z < n, "certificate: root out of range");
  for (std::size_t j = 0; j < weights.size(); ++j) {
    require(weights[j].omega.size() == n, "certificate: weight length mismatch");
    require(weights[j].r > 0.0 && (j == 0 || weights[j].r > weights[j - 1].r),
            "certificate: radii must be positive and strictly increasing");
  }

  const std::size_t m = weights.size();
  std::vector<std::vector<char>> member(m, std::vector<char>(n, 0));
  std::vector<double> mass(n, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const WeightedGraphMetric metric(g, weights[j].omega);
    const auto dist = metric.dist(z);
    const double R = weights[j].r;
    const double inner = R / (8.0 * c_prime);
    for (std::size_t x = 0; x < n; ++x) {
      if (dist[x] > inner && dist[x] <= R) {
        member[j][x] = 1;
        mass[x] += std::pow(weights[j].omega[x] / R, d);
      }
    }
  }

  Certificate c;
  c.omega.resize(n);
  for (std::size_t x = 0; x < n; ++x) c.omega[x] = std::pow(mass[x], 1.0 / d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t x = 0; x < n; ++x)
        if (member[i][x] && member[j][x]) {
          c.overlaps.emplace_back(i + 1, j + 1);
          break;
        }
  c.annuli_disjoint = c.overlaps.empty();

  const auto hop = g.hop_distances(z);
  const double reach = 2.0 * weights.back().r;
  std::vector<Vertex> target;
  for (Vertex x = 0; x < n; ++x)
    if (hop[x] != std::numeric_limits<std::size_t>::max() && static_cast<double>(hop[x]) > reach)
      target.push_back(x);
  require(!target.empty(), "certificate: target set empty (B_G(z, 2 r_n) exhausts the graph)");
  c.target_size = target.size();

  const auto dz = WeightedGraphMetric(g, c.omega).dist(z);
  c.distance = kInf;
  for (Vertex x : target) c.distance = std::min(c.distance, dz[x]);
  c.norm = lp_norm(c.omega, d);
  if (!(c.norm > 0.0)) throw DegenerateInstance("certificate: every annulus is empty");
  c.ratio = c.distance / c.norm;
  return c;
}

std::vector<double> enforce_regularity(const Graph& g, std::span<const double> w, double c_prime) {
  require(c_prime > 1.0, "enforce_regularity: C' must exceed 1");
  const std::size_t n = g.vertex_count();
  require(w.size() == n, "enforce_regularity: weight length mismatch");
  std::vector<double> val(w.begin(), w.end());
  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item> heap;
  for (Vertex v = 0; v < n; ++v) heap.emplace(val[v], v);
  while (!heap.empty()) {
    auto [x, u] = heap.top();
    heap.pop();
    if (x < val[u]) continue;
    const double pushed = x / c_prime;
    for (Vertex v : g.neighbors(u)) {
      if (pushed > val[v]) {
        val[v] = pushed;
        heap.emplace(pushed, v);
      }
    }
  }
  for (double& x : val) x = std::max(0.5, x);
  return val;
}

}  // namespace confpack
