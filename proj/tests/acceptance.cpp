// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "confpack/extremal.hpp"
#include "confpack/spectral.hpp"
#include "confpack/weights.hpp"
#include "confpack/wgraph.hpp"
#include "oracles.hpp"

using namespace confpack;

namespace {

// Tolerances and limits.
constexpr double kMassTol = 1e-12;
constexpr double kDriftLimit = 1.5;
constexpr double kVelTol = 0.02;
constexpr double kPathVelTarget = 9.90;
constexpr double kDimLo = 1.8, kDimHi = 2.2;
constexpr double kMcSigmas = 3.0;
constexpr double kSpectrumTol = 1e-8;
// Growth constant for the combined weight against R^2 log^2(2 + R).
constexpr double kPolylogConstant = 32.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Emitted {
  std::string label;
  std::vector<double> omega;
  int d_star;
};
std::vector<Emitted> g_emitted;

void record(const std::string& label, const ConformalWeight& w) {
  g_emitted.push_back({label, w.omega, w.d_star});
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

QuasiPackedGraph rsa500() {
  RsaOptions o;
  o.dimension = 2;
  o.count = 500;
  o.seed = 1;
  return gen_rsa(o).graph;
}

std::vector<std::pair<std::string, QuasiPackedGraph>> counting_instances() {
  return {{"grid d=1", gen_grid(1, 512).graph},          {"grid d=2", gen_grid(2, 32).graph},
          {"grid d=3", gen_grid(3, 10).graph},           {"rsa d=2", rsa500()},
          {"accumulation d=2", gen_accumulation(2, 12).graph}, {"accumulation d=1", gen_accumulation(1, 24).graph},
          {"star", gen_star(2, 1000).graph}};
}

// ---- criterion 1
Outcome counting_bounds() {
  Outcome o;
  std::size_t worst_instance = 0;
  double worst_raw = 0.0, worst_trunc = 0.0;
  for (const auto& [name, g] : counting_instances()) {
    DyadicFamily f(g.space.dimension);
    try {
      WeightBuilder b(g, f);
      for (int i = 0; i < f.system_count(); ++i)
        for (int k = 3; k <= 12; ++k) {
          const auto t = b.table(i, k);
          // independent recount from the raw entries, exact integers
          std::vector<std::uint64_t> raw(64, 0), trunc(64, 0);
          for (const auto& e : t.entries()) {
            ++raw[e.level];
            ++trunc[std::min(e.level, k)];
          }
          const std::uint64_t s = static_cast<std::uint64_t>(f.child_stride());
          const std::uint64_t n = g.vertex_count();
          for (int j = 0; j < 64; ++j) {
            if ((raw[j] << j) > 2 * s * n || (trunc[j] << j) > 4 * s * n) {
              o.pass = false;
              o.detail = name + " system " + std::to_string(i + 1) + " j=" + std::to_string(j);
            }
            worst_raw = std::max(worst_raw, static_cast<double>(raw[j] << j) / (s * n));
            worst_trunc = std::max(worst_trunc, static_cast<double>(trunc[j] << j) / (s * n));
          }
        }
    } catch (const AssertionFailure& e) {
      o.pass = false;
      o.detail = name + ": " + e.what();
    }
    ++worst_instance;
  }
  if (o.pass)
    o.detail = std::to_string(worst_instance) + " instances, max count*2^j/(s|V|) = " + fmt("%.3f", worst_raw) +
               " (bound 2), truncated " + fmt("%.3f", worst_trunc) + " (bound 4)";
  return o;
}

// ---- criterion 2
bool box_contains(const Box& b, std::span<const double> x) {
  for (std::size_t j = 0; j < x.size(); ++j)
    if (!(b.lo[j] <= x[j] && x[j] < b.hi[j])) return false;
  return true;
}

Outcome dyadic_soundness() {
  std::mt19937_64 rng(20260101);
  std::size_t nest = 0, tile = 0, cover = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    DyadicFamily f(d);
    const int level = static_cast<int>(rng() % 21) - 10;
    const int system = static_cast<int>(rng() % f.system_count());
    std::vector<double> x(d);
    for (auto& v : x) v = std::ldexp(to_unit(rng()) * 2.0 - 1.0, 6);
    const auto c = f.cube_of(x, level, system);
    const auto b = f.box(c);
    if (!box_contains(b, x)) ++tile;
    for (int j = 0; j < d; ++j)
      for (int step : {-1, 1}) {
        CubeKey nb = c;
        nb.k[j] += step;
        if (box_contains(f.box(nb), x)) ++tile;
      }
    const auto p = f.parent(c);
    const auto pb = f.box(p);
    bool inside = true;
    for (int j = 0; j < d; ++j) inside = inside && pb.lo[j] <= b.lo[j] && b.hi[j] <= pb.hi[j];
    if (!inside || !(p == f.cube_of(x, level + 1, system))) ++nest;
  }
  for (int trial = 0; trial < 10000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    DyadicFamily f(d);
    const int m = static_cast<int>(rng() % 11) - 5;
    const double side = std::ldexp(1.0, m);
    std::vector<Point> pts(2 + rng() % 6, Point(d));
    std::vector<double> base(d);
    for (auto& v : base) v = (to_unit(rng()) * 2.0 - 1.0) * 100.0;
    for (auto& p : pts)
      for (int j = 0; j < d; ++j) p[j] = base[j] + side * to_unit(rng());
    try {
      const auto r = covering_cube(f, pts);
      if (r.cube.level > m + 2) ++cover;
      const auto b = f.box(r.cube);
      for (const auto& p : pts)
        if (!box_contains(b, p)) ++cover;
    } catch (const AssertionFailure&) {
      ++cover;
    }
  }
  Outcome o;
  o.pass = nest == 0 && tile == 0 && cover == 0;
  o.detail = "1e5 probes: " + std::to_string(nest) + " nesting and " + std::to_string(tile) +
             " tiling failures; 1e4 sets: " + std::to_string(cover) + " covering failures";
  return o;
}

// ---- criterion 3
double grid_growth_constant(int m, std::string& per_k) {
  const auto g = gen_grid(2, m);
  WeightBuilder b(g.graph, DyadicFamily(2));
  const auto roots = sample_roots(g.graph.graph, 3);
  double C = 0.0;
  for (int k : {4, 6, 8}) {
    const auto w = b.build(k);
    record("grid " + std::to_string(m) + " k=" + std::to_string(k), w);
    WeightedGraphMetric metric(g.graph.graph, w.omega);
    const std::vector<double> R{std::ldexp(1.0, k / 2)};
    const auto rep = growth_profile(metric, R, roots, 2);
    const double c = static_cast<double>(rep.entries[0].max_ball) / std::ldexp(1.0, k);
    per_k += " k=" + std::to_string(k) + ":" + fmt("%.3f", c);
    C = std::max(C, c);
  }
  return C;
}

double combined_polylog(const QuasiPackedGraph& g, const std::string& label) {
  const auto w = build_combined(g, DyadicFamily(g.space.dimension), 10);
  record(label + " combined", w);
  WeightedGraphMetric metric(g.graph, w.omega);
  const auto roots = sample_roots(g.graph, 3);
  const auto rep = growth_profile(metric, radii_grid(max_eccentricity(metric, roots)), roots, 2);
  return rep.max_const_polylog();
}

double unit_polylog(const QuasiPackedGraph& g) {
  WeightedGraphMetric metric(g.graph, std::vector<double>(g.vertex_count(), 1.0));
  const auto roots = sample_roots(g.graph, 3);
  return growth_profile(metric, radii_grid(max_eccentricity(metric, roots)), roots, 2).max_const_polylog();
}

double g_grid_C = 0.0;

Outcome growth_bound() {
  Outcome o;
  std::string k32, k64;
  const double c32 = grid_growth_constant(32, k32);
  const double c64 = grid_growth_constant(64, k64);
  g_grid_C = c32;
  const double drift = std::max(c32 / c64, c64 / c32);

  const auto acc8 = gen_accumulation(2, 8).graph, acc12 = gen_accumulation(2, 12).graph;
  const auto star100 = gen_star(2, 100).graph, star1000 = gen_star(2, 1000).graph;
  const double a8 = combined_polylog(acc8, "accumulation 8"), a12 = combined_polylog(acc12, "accumulation 12");
  const double s100 = combined_polylog(star100, "star 100"), s1000 = combined_polylog(star1000, "star 1000");
  const double u100 = unit_polylog(star100), u1000 = unit_polylog(star1000);

  // a leaf sees every vertex within distance 2 under the unit weight
  WeightedGraphMetric unit(star1000.graph, std::vector<double>(star1000.vertex_count(), 1.0));
  const std::size_t leaf_ball = unit.ball(1, 2.0).size();

  o.pass = drift <= kDriftLimit && a12 <= kPolylogConstant && s1000 <= kPolylogConstant &&
           a12 <= kDriftLimit * a8 && s1000 <= kDriftLimit * s100 && leaf_ball == star1000.vertex_count() &&
           u1000 > kPolylogConstant && u1000 >= 5.0 * u100;
  o.detail = "grid C32=" + fmt("%.3f", c32) + " (" + k32.substr(1) + ") C64=" + fmt("%.3f", c64) + " drift " +
             fmt("%.3f", drift) + "; combined polylog C: accumulation " + fmt("%.2f", a12) + ", star " +
             fmt("%.2f", s1000) + " (limit " + fmt("%.0f", kPolylogConstant) + "); unit weight star " +
             fmt("%.1f", u100) + " -> " + fmt("%.1f", u1000) + ", |B(leaf,2)|=" + std::to_string(leaf_ball);
  return o;
}

// ---- criterion 4
Outcome normalization() {
  for (const auto& [name, g] : counting_instances()) {
    WeightBuilder b(g, DyadicFamily(g.space.dimension));
    for (int k = 3; k <= 10; ++k) record(name + " k=" + std::to_string(k), b.build(k));
    record(name + " combined", b.combined(10));
  }
  Outcome o;
  double worst = 0.0;
  std::string where;
  for (const auto& e : g_emitted) {
    long double s = 0;
    for (double x : e.omega) s += std::pow(static_cast<long double>(x), e.d_star);
    const double err = static_cast<double>(std::abs(s / e.omega.size() - 1.0L));
    if (err > worst) {
      worst = err;
      where = e.label;
    }
  }
  o.pass = worst <= kMassTol;
  o.detail = std::to_string(g_emitted.size()) + " weights, worst relative mass error " + fmt("%.2e", worst) +
             (where.empty() ? "" : " (" + where + ")");
  return o;
}

// ---- criterion 5
SpectrumReport g_grid32_spectrum;

Outcome weyl_bound() {
  const auto g16 = oracle::grid(16, 16), g32 = oracle::grid(32, 32);
  const auto s16 = spectrum(g16);
  g_grid32_spectrum = spectrum(g32);
  const auto w16 = weyl_check(s16, g16, 2.0), w32 = weyl_check(g_grid32_spectrum, g32, 2.0);
  const double drift = std::max(w32.C_emp / w16.C_emp, w16.C_emp / w32.C_emp);

  // every row must respect the recorded constants
  bool rows = true;
  for (const auto& r : w32.per_k) {
    const double frac = static_cast<double>(r.k) / 1024.0;
    rows = rows && r.lambda <= w32.C_emp * r.shape * (1 + 1e-12) && r.lambda >= w32.c_emp * frac * (1 - 1e-12);
  }
  double trace = 0.0;
  for (double l : g_grid32_spectrum.eigenvalues) trace += l;

  const auto path = spectrum(oracle::path(256));
  const auto ref = oracle::path_spectrum(256);
  double worst = 0.0;
  for (std::size_t k = 0; k < 256; ++k) worst = std::max(worst, std::abs(path.eigenvalues[k] - ref[k]));

  Outcome o;
  o.pass = drift <= kDriftLimit && w32.c_emp > 0.0 && rows && worst <= kSpectrumTol &&
           std::abs(trace - 1024.0) <= 1e-8;
  o.detail = "C_emp 16x16=" + fmt("%.4f", w16.C_emp) + " 32x32=" + fmt("%.4f", w32.C_emp) + " drift " +
             fmt("%.3f", drift) + "; c_emp=" + fmt("%.4f", w32.c_emp) + "; path n=256 max error " +
             fmt("%.1e", worst);
  return o;
}

// ---- criterion 6
Outcome bumps() {
  const auto g = gen_grid(2, 32);
  const auto w = build_combined(g.graph, DyadicFamily(2), 10);
  record("grid 32 combined", w);
  WeightedGraphMetric metric(g.graph.graph, w.omega);
  if (g_grid32_spectrum.n != 1024) g_grid32_spectrum = spectrum(g.graph.graph);
  Outcome o;
  std::string d;
  for (int k : {4, 6, 8}) {
    const double R = std::ldexp(1.0, k / 2);
    const auto K = static_cast<std::size_t>(std::ceil(g_grid_C * std::ldexp(1.0, k)));
    const auto r = ball_carving_bumps(metric, R, K);
    // disjoint supports checked directly
    std::vector<int> owner(1024, -1);
    bool disjoint = true;
    for (std::size_t b = 0; b < r.count(); ++b)
      for (auto [v, f] : r.bumps[b].values) {
        disjoint = disjoint && owner[v] == -1;
        owner[v] = static_cast<int>(b);
      }
    const bool minmax = r.count() >= 1 && g_grid32_spectrum.eigenvalues[r.count() - 1] <= r.max_rayleigh + 1e-12;
    o.pass = o.pass && disjoint && r.count_bound_met(1024) && minmax;
    d += " R=" + fmt("%.0f", R) + " K=" + std::to_string(K) + ": " + std::to_string(r.count()) + " functions (need " +
         std::to_string((1024 + 2 * K - 1) / (2 * K)) + "), lambda=" +
         fmt("%.4f", g_grid32_spectrum.eigenvalues[std::max<std::size_t>(r.count(), 1) - 1]) + " <= " +
         fmt("%.4f", r.max_rayleigh) + ";";
  }
  o.detail = d.substr(1, d.size() - 2);
  return o;
}

// ---- criterion 7
Outcome vel() {
  Outcome o;
  const auto p = oracle::path(100);
  const auto rp = vel_solve(p, {{0}, {99}}, 2.0);
  const double path_err = std::abs(rp.value - kPathVelTarget) / kPathVelTarget;
  bool ok = path_err <= kVelTol && rp.relative_gap <= kVelTol;

  double worst_small = 0.0;
  std::size_t graphs = 0;
  for (int n = 2; n <= 5; ++n)
    for (const auto& g : oracle::connected_graphs(n)) {
      const double grid = oracle::grid_vel(g, 0, static_cast<Vertex>(n - 1), 2.0, n <= 4 ? 20 : 12);
      const auto r = vel_solve(g, {{0}, {static_cast<Vertex>(n - 1)}}, 2.0);
      worst_small = std::max(worst_small, std::abs(r.value - grid) / grid);
      ok = ok && grid <= r.dual * (1 + 1e-9);
      ++graphs;
    }
  ok = ok && worst_small <= kVelTol;

  const int side = 67;
  const auto grid = oracle::grid(side, side);
  const Vertex z = static_cast<Vertex>((side / 2) * side + side / 2);
  const auto hop = grid.hop_distances(z);
  double prev = 0.0;
  std::string annuli;
  for (std::size_t r : {4u, 8u, 16u, 32u}) {
    PathFamilySpec spec{{z}, {}};
    for (Vertex v = 0; v < grid.vertex_count(); ++v)
      if (hop[v] >= r) spec.targets.push_back(v);
    // feasible weight 1/(1+hop) inside the ball: a certified lower bound
    std::vector<double> feas(grid.vertex_count(), 0.0);
    for (Vertex v = 0; v < grid.vertex_count(); ++v)
      if (hop[v] <= r) feas[v] = 1.0 / (1.0 + static_cast<double>(hop[v]));
    const double bound = shortest_path(grid, spec, feas).length / lp_norm(feas, 2.0);
    const auto res = vel_solve(grid, spec, 2.0);
    ok = ok && res.value >= bound && res.value >= prev;
    prev = res.value;
    annuli += " " + std::to_string(r) + ":" + fmt("%.4f", res.value) + ">=" + fmt("%.4f", bound);
  }
  o.pass = ok;
  o.detail = "P_100 " + fmt("%.4f", rp.value) + " (target " + fmt("%.2f", kPathVelTarget) + ", gap " +
             fmt("%.4f", rp.relative_gap) + "); " + std::to_string(graphs) +
             " small graphs, worst deviation from grid oracle " + fmt("%.4f", worst_small) + "; annuli" + annuli;
  return o;
}

// ---- criterion 8
Outcome heat() {
  const auto g = oracle::torus(64);
  HeatOptions exact;
  exact.method = HeatMethod::Propagation;
  const auto series = heat_kernel(g, 0, 200, exact);
  double worst = 0.0;
  for (const auto& h : series)
    worst = std::max(worst, std::abs(h.p - oracle::torus_return(64, h.t)) / oracle::torus_return(64, h.t));
  const auto fit = spectral_dim_fit(series, 10, 200);

  HeatOptions mc;
  mc.method = HeatMethod::MonteCarlo;
  mc.seed = 8;
  mc.walks = 1u << 16;
  const auto est = heat_kernel(g, 0, 200, mc);
  double worst_sigma = 0.0;
  for (std::size_t t : {10u, 25u, 50u, 100u, 200u}) {
    const double ref = oracle::torus_return(64, t);
    const double se = std::sqrt(ref * (1 - ref) / static_cast<double>(mc.walks));
    worst_sigma = std::max(worst_sigma, std::abs(est[t - 1].p - ref) / se);
  }
  Outcome o;
  o.pass = worst <= 1e-9 && fit.dimension >= kDimLo && fit.dimension <= kDimHi && worst_sigma <= kMcSigmas;
  o.detail = "fitted dimension " + fmt("%.4f", fit.dimension) + " over t in [10,200]; exact route vs closed form " +
             fmt("%.1e", worst) + "; Monte Carlo worst deviation " + fmt("%.2f", worst_sigma) + " SE";
  return o;
}

// ---- criterion 9
Outcome sum_inequality() {
  std::mt19937_64 rng(909);
  std::size_t violations = 0, tested = 0;
  double worst = kInf;
  while (tested < 10000) {
    const int k = static_cast<int>(rng() % 21);
    const double d = 2.0 + static_cast<double>(rng() % 2);
    const auto a = oracle::random_tuple(rng, k);
    if (!oracle::sum_inequality_premise(a, k)) continue;
    ++tested;
    const double slack = oracle::sum_inequality_slack(a, k, d);
    worst = std::min(worst, slack);
    if (slack < 0) ++violations;
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = std::to_string(tested) + " tuples, " + std::to_string(violations) + " violations, min slack " +
             fmt("%.3e", worst);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> order{
      {1, "level counting bound", 30, counting_bounds}, {2, "dyadic system soundness", 10, dyadic_soundness},
      {3, "growth bound", 180, growth_bound},           {5, "eigenvalue bound", 60, weyl_bound},
      {6, "bump functions", 30, bumps},                 {7, "vertex extremal length", 120, vel},
      {8, "heat kernel dimension", 120, heat},          {9, "weighted-sum inequality", 5, sum_inequality},
      {4, "unit mass normalization", kInf, normalization}};
  std::vector<std::string> lines(10);
  bool all = true;
  for (const auto& c : order) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      o.pass = false;
      o.detail += "; runtime over " + fmt("%.0f", c.limit_s) + " s";
    }
    all = all && o.pass;
    lines[c.id] = std::string(o.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + " (" + c.name +
                  "): " + o.detail + " [" + fmt("%.1f", secs) + " s]";
  }
  for (int i = 1; i <= 9; ++i) std::puts(lines[i].c_str());
  return all ? 0 : 1;
}
