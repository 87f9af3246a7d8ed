#include "confpack/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace confpack {

namespace {

int floor_log2(double x) {
  int e = 0;
  std::frexp(x, &e);  // x = f * 2^e, f in [0.5, 1)
  return e - 1;
}

int ceil_log2(double x) {
  int e = 0;
  const double f = std::frexp(x, &e);
  return f == 0.5 ? e - 1 : e;
}

double linf(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

LevelWindow level_window(std::span<const Point> points, int child_stride) {
  require(points.size() >= 2, "level_window: need at least two points");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a][0] < points[b][0]; });
  double best = kInf;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (points[order[j]][0] - points[order[i]][0] >= best) break;
      const double dist = linf(points[order[i]], points[order[j]]);
      if (dist > 0) best = std::min(best, dist);
    }
  }
  if (!std::isfinite(best)) throw DegenerateInstance("degenerate instance: all points coincide");

  double extent = 0.0;
  for (const auto& p : points)
    for (double x : p) extent = std::max(extent, std::abs(x));

  LevelWindow w;
  // Cubes of side 2^n <= best hold at most one distinct point.
  w.lowest = floor_log2(best) + 1;
  // Once 2^t / 3 > extent, the level-t partition of V no longer changes.
  const int stable = ceil_log2(extent) + 2;
  w.highest = std::max(w.lowest, stable + child_stride - 1);
  return w;
}

LevelTable::LevelTable(int system, int child_stride, std::size_t vertex_count, int k,
                       std::vector<LevelEntry> entries)
    : system_(system), stride_(child_stride), n_(vertex_count), k_(k), entries_(std::move(entries)) {}

std::vector<std::size_t> LevelTable::level_histogram() const {
  std::vector<std::size_t> h;
  for (const auto& e : entries_) {
    if (static_cast<std::size_t>(e.level) >= h.size()) h.resize(e.level + 1, 0);
    ++h[e.level];
  }
  return h;
}

std::vector<std::size_t> LevelTable::truncated_histogram() const {
  int top = 0;
  for (const auto& e : entries_) top = std::max(top, truncated(e));
  std::vector<std::size_t> h(static_cast<std::size_t>(std::min(k_, top)) + 1, 0);
  for (const auto& e : entries_) ++h[truncated(e)];
  return h;
}

double LevelTable::observed_level_constant() const {
  double c = 0.0;
  const auto h = level_histogram();
  for (std::size_t j = 0; j < h.size(); ++j)
    c = std::max(c, static_cast<double>(h[j]) * std::ldexp(1.0, static_cast<int>(j)) /
                        (stride_ * static_cast<double>(n_)));
  return c;
}

double LevelTable::observed_truncated_constant() const {
  double c = 0.0;
  const auto h = truncated_histogram();
  for (std::size_t j = 0; j < h.size(); ++j)
    c = std::max(c, static_cast<double>(h[j]) * std::ldexp(1.0, static_cast<int>(j)) /
                        (stride_ * static_cast<double>(n_)));
  return c;
}

void LevelTable::assert_counting_bounds() const {
  const auto raw = level_histogram();
  for (std::size_t j = 0; j < raw.size(); ++j) {
    // count * 2^j <= 2 s |V|, in exact integer arithmetic
    const unsigned __int128 lhs = static_cast<unsigned __int128>(raw[j]) << j;
    const unsigned __int128 rhs = static_cast<unsigned __int128>(2 * stride_) * n_;
    check_invariant(lhs <= rhs, "level counting bound violated in system " +
                                    std::to_string(system_ + 1) + " at level value j=" +
                                    std::to_string(j) + ": " + std::to_string(raw[j]) +
                                    " cubes");
  }
  const auto trunc = truncated_histogram();
  for (std::size_t j = 0; j < trunc.size(); ++j) {
    const unsigned __int128 lhs = static_cast<unsigned __int128>(trunc[j]) << j;
    const unsigned __int128 rhs = static_cast<unsigned __int128>(4 * stride_) * n_;
    check_invariant(lhs <= rhs, "truncated level counting bound violated in system " +
                                    std::to_string(system_ + 1) + " at j=" + std::to_string(j));
  }
}

namespace {

using KeyArray = std::array<std::int64_t, kMaxDim>;

/// Untruncated level entries of one system over the given window.
std::vector<LevelEntry> raw_levels(std::span<const Point> points, const DyadicFamily& family,
                                   int system, const LevelWindow& w) {
  const int s = family.child_stride();
  const int base = w.lowest - s;
  const int span_levels = w.highest - base + 1;
  const std::size_t n = points.size();
  std::vector<std::vector<KeyArray>> keys(span_levels, std::vector<KeyArray>(n));
  for (std::size_t v = 0; v < n; ++v) {
    CubeKey c = family.cube_of(points[v], base, system);
    keys[0][v] = c.k;
    for (int l = 1; l < span_levels; ++l) {
      c = family.parent(c);
      keys[l][v] = c.k;
    }
  }

  std::vector<LevelEntry> out;
  std::vector<std::size_t> idx(n);
  for (int level = w.lowest; level <= w.highest; ++level) {
    const auto& own = keys[level - base];
    const auto& child = keys[level - s - base];
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (own[a] != own[b]) return own[a] < own[b];
      return child[a] < child[b];
    });
    for (std::size_t g = 0; g < n;) {
      std::size_t h = g;
      std::size_t largest_child = 0;
      while (h < n && own[idx[h]] == own[idx[g]]) {
        std::size_t run = h;
        while (run < n && own[idx[run]] == own[idx[g]] && child[idx[run]] == child[idx[h]]) ++run;
        largest_child = std::max(largest_child, run - h);
        h = run;
      }
      const std::size_t size = h - g;
      if (size >= 2 && largest_child < size) {
        LevelEntry e;
        e.cube.system = system;
        e.cube.level = level;
        e.cube.dim = family.dimension();
        e.cube.k = own[idx[g]];
        e.count = size;
        e.level = static_cast<int>(std::bit_width(size - largest_child)) - 1;
        out.push_back(e);
      }
      g = h;
    }
  }
  return out;
}

/// Multi-resolution hash grid over body centers, one grid per radius class.
class BodyIndex {
 public:
  BodyIndex(std::span<const Body> bodies, int d) : bodies_(bodies), d_(d) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t v = 0; v < bodies.size(); ++v) by_class[floor_log2(bodies[v].radius)].push_back(v);
    for (auto& [c, members] : by_class) {
      RadiusClass rc;
      rc.cell = std::ldexp(1.0, c + 1);
      rc.members = std::move(members);
      for (std::size_t v : rc.members) rc.cells[cell_of(bodies[v].center, rc.cell)].push_back(v);
      classes_.push_back(std::move(rc));
    }
  }

  /// Calls f(v) for every body with dist(center, box) <= reach + radius.
  template <class F>
  void query(const Box& box, double reach, MetricKind metric, F&& f) const {
    for (const auto& rc : classes_) {
      KeyArray lo{}, hi{};
      double cells = 1.0;
      for (int j = 0; j < d_; ++j) {
        const double a = std::floor((box.lo[j] - reach - rc.cell) / rc.cell);
        const double b = std::floor((box.hi[j] + reach + rc.cell) / rc.cell);
        cells *= (b - a + 1.0);
        lo[j] = static_cast<std::int64_t>(std::max(a, -1e15));
        hi[j] = static_cast<std::int64_t>(std::min(b, 1e15));
      }
      auto test = [&](std::size_t v) {
        const Body& body = bodies_[v];
        if (box_distance(body.center, box, metric) <= reach + body.radius) f(v);
      };
      if (cells > static_cast<double>(rc.members.size())) {
        for (std::size_t v : rc.members) test(v);
        continue;
      }
      KeyArray cur = lo;
      while (true) {
        auto it = rc.cells.find(cur);
        if (it != rc.cells.end())
          for (std::size_t v : it->second) test(v);
        int j = 0;
        for (; j < d_; ++j) {
          if (cur[j] < hi[j]) {
            ++cur[j];
            break;
          }
          cur[j] = lo[j];
        }
        if (j == d_) break;
      }
    }
  }

 private:
  struct KeyHash {
    std::size_t operator()(const KeyArray& k) const noexcept {
      std::uint64_t h = 1469598103934665603ULL;
      for (auto x : k) h = (h ^ static_cast<std::uint64_t>(x)) * 1099511628211ULL;
      return static_cast<std::size_t>(h);
    }
  };
  struct RadiusClass {
    double cell = 1.0;
    std::vector<std::size_t> members;
    std::unordered_map<KeyArray, std::vector<std::size_t>, KeyHash> cells;
  };

  KeyArray cell_of(const Point& x, double cell) const {
    KeyArray k{};
    for (int j = 0; j < d_; ++j) k[j] = static_cast<std::int64_t>(std::floor(x[j] / cell));
    return k;
  }

  std::span<const Body> bodies_;
  int d_;
  std::vector<RadiusClass> classes_;
};

// 2^lev* / (1 + k - lev*)^2, i.e. the theta coefficient raised to d*.
double coefficient_power(int level, int k) {
  const int t = std::min(level, k);
  const double denom = 1.0 + k - t;
  return std::ldexp(1.0, t) / (denom * denom);
}

}  // namespace

LevelTable build_level_table(std::span<const Point> points, const DyadicFamily& family, int system,
                             int k) {
  require(!points.empty(), "build_level_table: empty vertex set");
  require(k >= 3, "build_level_table: k must be >= 3");
  std::vector<LevelEntry> entries;
  if (points.size() >= 2) {
    try {
      entries = raw_levels(points, family, system, level_window(points, family.child_stride()));
    } catch (const DegenerateInstance&) {
      // all points coincide: no cube ever splits
    }
  }
  LevelTable t(system, family.child_stride(), points.size(), k, std::move(entries));
  t.assert_counting_bounds();
  return t;
}

double theta(const Body& body, const LevelEntry& e, const LevelTable& table,
             const DyadicFamily& family, double tau, MetricKind metric) {
  const int n = e.cube.level;
  const double side = std::ldexp(1.0, n);
  if (box_distance(body.center, family.box(e.cube), metric) > 2.0 * tau * side + body.radius)
    return 0.0;
  const int lev = table.truncated(e);
  const double ds = star_exponent(family.dimension());
  const double coef = std::pow(2.0, lev / ds) / std::pow(1.0 + table.k() - lev, 2.0 / ds);
  return coef * std::min(1.0 / side, 1.0 / body.diameter());
}

double ConformalWeight::mass() const { return power_mean_mass(omega, d_star); }

double normalize_mass(std::vector<double>& omega, int d_star) {
  double factor = 1.0;
  const double top = omega.empty() ? 0.0 : *std::max_element(omega.begin(), omega.end());
  if (top > 0.0 && std::isfinite(top)) {
    for (double& x : omega) x /= top;
    factor = 1.0 / top;
  }
  for (int pass = 0; pass < 3; ++pass) {
    const double m = power_mean_mass(omega, d_star);
    if (!(m > 0) || !std::isfinite(m)) throw DegenerateInstance("degenerate instance: zero mass");
    if (pass > 0 && std::abs(m - 1.0) <= 1e-15) break;
    const double f = std::pow(m, -1.0 / d_star);
    for (double& x : omega) x *= f;
    factor *= f;
  }
  return factor;
}

WeightBuilder::WeightBuilder(const QuasiPackedGraph& g, const DyadicFamily& family)
    : n_(g.vertex_count()),
      d_star_(star_exponent(family.dimension())),
      systems_(family.system_count()),
      stride_(family.child_stride()) {
  require(family.dimension() == g.space.dimension, "WeightBuilder: family dimension mismatch");
  if (n_ <= 1) throw DegenerateInstance("degenerate instance");
  const auto points = g.representatives();
  diag_.window = level_window(points, stride_);

  omega0_.resize(n_);
  for (std::size_t v = 0; v < n_; ++v) omega0_[v] = g.bodies[v].diameter();

  raw_.resize(systems_);
  parallel_for(static_cast<std::size_t>(systems_), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      raw_[i] = raw_levels(points, family, static_cast<int>(i), diag_.window);
  });
  for (const auto& entries : raw_) {
    diag_.defined_cubes += entries.size();
    for (const auto& e : entries) max_level_ = std::max(max_level_, e.level);
  }
  for (int i = 0; i < systems_; ++i) {
    LevelTable t(i, stride_, n_, std::numeric_limits<int>::max() / 2, raw_[i]);
    t.assert_counting_bounds();
    diag_.level_constant = std::max(diag_.level_constant, t.observed_level_constant());
  }

  const BodyIndex index(g.bodies, g.space.dimension);
  const std::size_t width = static_cast<std::size_t>(max_level_) + 1;
  accum_.assign(systems_, std::vector<double>(n_ * width, 0.0));
  std::vector<std::size_t> exceptional(systems_, 0);
  parallel_for(static_cast<std::size_t>(systems_), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      auto& acc = accum_[i];
      for (const auto& entry : raw_[i]) {
        const double side = std::ldexp(1.0, entry.cube.level);
        const Box box = family.box(entry.cube);
        std::size_t exc = 0;
        index.query(box, 2.0 * g.tau * side, g.space.metric, [&](std::size_t v) {
          const double m = std::min(1.0 / side, 1.0 / omega0_[v]);
          acc[v * width + entry.level] += std::pow(m, d_star_);
          if (omega0_[v] > side) ++exc;
        });
        exceptional[i] = std::max(exceptional[i], exc);
      }
    }
  });
  diag_.max_exceptional = *std::max_element(exceptional.begin(), exceptional.end());
}

LevelTable WeightBuilder::table(int system, int k) const {
  require(system >= 0 && system < systems_, "system index out of range");
  LevelTable t(system, stride_, n_, k, raw_[system]);
  t.assert_counting_bounds();
  return t;
}

std::vector<double> WeightBuilder::system_weight(int system, int k) const {
  require(k >= 3, "k must be >= 3");
  const std::size_t width = static_cast<std::size_t>(max_level_) + 1;
  std::vector<double> coef(width);
  for (std::size_t j = 0; j < width; ++j) coef[j] = coefficient_power(static_cast<int>(j), k);
  const auto& acc = accum_[system];
  std::vector<double> w(n_, 0.0);
  for (std::size_t v = 0; v < n_; ++v) {
    double s = 0.0;
    for (std::size_t j = 0; j < width; ++j) s += coef[j] * acc[v * width + j];
    w[v] = omega0_[v] * std::pow(s, 1.0 / d_star_);
  }
  return w;
}

ConformalWeight WeightBuilder::build(int k, const WeightOptions& opt) const {
  require(k >= 3, "build_weight_k: k must be >= 3");
  for (int i = 0; i < systems_; ++i) table(i, k);  // asserts the truncated bounds at this k

  ConformalWeight w;
  w.d_star = d_star_;
  w.k = k;
  w.systems = systems_;
  w.omega.assign(n_, 0.0);
  for (int i = 0; i < systems_; ++i) {
    const auto part = system_weight(i, k);
    for (std::size_t v = 0; v < n_; ++v) w.omega[v] += part[v];
  }
  w.pre_norm_mass = power_mean_mass(w.omega, d_star_);
  if (!(w.pre_norm_mass > 0)) throw DegenerateInstance("degenerate instance");
  check_invariant(w.pre_norm_mass <= opt.mass_ceiling,
                  "pre-normalization mass " + std::to_string(w.pre_norm_mass) +
                      " exceeds the configured ceiling " + std::to_string(opt.mass_ceiling));
  w.normalization_factor = normalize_mass(w.omega, d_star_);
  return w;
}

ConformalWeight WeightBuilder::combined(int k_max, const WeightOptions& opt) const {
  require(k_max >= 3, "build_combined: k_max must be >= 3");
  const double scale = 6.0 / (std::numbers::pi * std::numbers::pi);
  std::vector<double> acc(n_, 0.0);
  for (int k = 3; k <= k_max; ++k) {
    const auto wk = build(k, opt);
    const double inv = 1.0 / (static_cast<double>(k) * k);
    for (std::size_t v = 0; v < n_; ++v) acc[v] += scale * std::pow(wk.omega[v], d_star_) * inv;
  }
  ConformalWeight w;
  w.d_star = d_star_;
  w.k_max = k_max;
  w.systems = systems_;
  w.omega.resize(n_);
  for (std::size_t v = 0; v < n_; ++v) w.omega[v] = std::pow(acc[v], 1.0 / d_star_);
  w.pre_norm_mass = power_mean_mass(w.omega, d_star_);
  w.normalization_factor = normalize_mass(w.omega, d_star_);
  return w;
}

ConformalWeight build_weight_k(const QuasiPackedGraph& g, const DyadicFamily& family, int k,
                               const WeightOptions& opt) {
  require(g.graph.connected(), "build_weight_k: graph must be connected");
  return WeightBuilder(g, family).build(k, opt);
}

ConformalWeight build_combined(const QuasiPackedGraph& g, const DyadicFamily& family, int k_max,
                               const WeightOptions& opt) {
  require(g.graph.connected(), "build_combined: graph must be connected");
  return WeightBuilder(g, family).combined(k_max, opt);
}

}  // namespace confpack
