#include "confpack/ambient.hpp"

#include <cmath>
#include <numbers>

namespace confpack {

std::string to_string(MetricKind m) { return m == MetricKind::Linf ? "linf" : "l2"; }

MetricKind metric_from_string(const std::string& s) {
  if (s == "linf") return MetricKind::Linf;
  if (s == "l2") return MetricKind::L2;
  throw InvalidArgument("metric: expected \"linf\" or \"l2\", got \"" + s + "\"");
}

double unit_ball_volume(int d, MetricKind m) {
  if (m == MetricKind::Linf) return std::ldexp(1.0, d);
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

AmbientSpace::AmbientSpace(int d, MetricKind m)
    : AmbientSpace(d, m, unit_ball_volume(d, m), unit_ball_volume(d, m)) {}

AmbientSpace::AmbientSpace(int d, MetricKind m, double c1, double c2)
    : dimension(d), metric(m), ahlfors_lower(c1), ahlfors_upper(c2) {
  require(d >= 1 && d <= kMaxDim, "dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  require(c1 > 0 && c1 <= c2, "Ahlfors constants must satisfy 0 < c1 <= c2");
}

double AmbientSpace::distance(std::span<const double> x, std::span<const double> y) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double t = std::abs(x[j] - y[j]);
    if (metric == MetricKind::Linf)
      acc = std::max(acc, t);
    else
      acc += t * t;
  }
  return metric == MetricKind::Linf ? acc : std::sqrt(acc);
}

std::size_t CubeKeyHash::operator()(const CubeKey& c) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  mix(static_cast<std::uint64_t>(c.system));
  mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(c.level)));
  for (int j = 0; j < c.dim; ++j) mix(static_cast<std::uint64_t>(c.k[j]));
  return static_cast<std::size_t>(h);
}

DyadicFamily::DyadicFamily(int dimension) : dim_(dimension), systems_(1) {
  require(dimension >= 1 && dimension <= kMaxDim,
          "dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  for (int j = 0; j < dimension; ++j) systems_ *= 3;
}

int DyadicFamily::shift_numerator(int system, int axis) const {
  int s = system;
  for (int j = 0; j < axis; ++j) s /= 3;
  return s % 3;
}

std::int64_t floor_three_scaled(double x, int level) {
  const double y = std::ldexp(x, -level);
  require(std::isfinite(y) && std::abs(y) < 0x1.0p60, "coordinate out of indexable range");
  const double m = std::floor(y);
  const double f = y - m;  // exact, f in [0, 1)
  // Exact sign of 3f - 1 and 3f - 2: fma rounds once and the true value is
  // never zero because no double equals 1/3 or 2/3.
  std::int64_t t = 0;
  if (std::fma(3.0, f, -1.0) >= 0.0) t = 1;
  if (std::fma(3.0, f, -2.0) >= 0.0) t = 2;
  return 3 * static_cast<std::int64_t>(m) + t;
}

std::int64_t DyadicFamily::lower_third_units(std::int64_t k, int shift_num, int level) {
  return 3 * k + level_sign(level) * shift_num;
}

CubeKey DyadicFamily::cube_of(std::span<const double> x, int level, int system) const {
  require(static_cast<int>(x.size()) == dim_, "cube_of: point dimension mismatch");
  CubeKey c;
  c.system = system;
  c.level = level;
  c.dim = dim_;
  const int sigma = level_sign(level);
  for (int j = 0; j < dim_; ++j) {
    const std::int64_t t = floor_three_scaled(x[j], level);
    c.k[j] = floor_div(t - sigma * shift_numerator(system, j), 3);
  }
  return c;
}

CubeKey DyadicFamily::parent(const CubeKey& c) const {
  // Level-n box in units of 2^n/3 is [3k + sa, 3k + 3 + sa); the parent index
  // is the unique k' with 2k' <= k + sa <= 2k' + 1.
  CubeKey p = c;
  p.level = c.level + 1;
  const int sigma = level_sign(c.level);
  for (int j = 0; j < dim_; ++j)
    p.k[j] = floor_div(c.k[j] + sigma * shift_numerator(c.system, j), 2);
  return p;
}

Box DyadicFamily::box(const CubeKey& c) const {
  Box b;
  b.lo.resize(dim_);
  b.hi.resize(dim_);
  for (int j = 0; j < dim_; ++j) {
    const std::int64_t lo = lower_third_units(c.k[j], shift_numerator(c.system, j), c.level);
    b.lo[j] = std::ldexp(static_cast<double>(lo) / 3.0, c.level);
    b.hi[j] = std::ldexp(static_cast<double>(lo + 3) / 3.0, c.level);
  }
  return b;
}

double diameter_linf(std::span<const Point> points) {
  if (points.empty()) return 0.0;
  const std::size_t d = points.front().size();
  double diam = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double lo = kInf, hi = -kInf;
    for (const auto& p : points) {
      lo = std::min(lo, p[j]);
      hi = std::max(hi, p[j]);
    }
    diam = std::max(diam, hi - lo);
  }
  return diam;
}

namespace {

int ceil_log2(double x) {
  int e = 0;
  const double f = std::frexp(x, &e);  // x = f * 2^e, f in [0.5, 1)
  return f == 0.5 ? e - 1 : e;
}

}  // namespace

CoveringResult covering_cube(const DyadicFamily& family, std::span<const Point> points,
                             std::optional<int> level_override) {
  require(!points.empty(), "covering_cube: empty point set");
  const double diam = diameter_linf(points);
  int level = 0;
  if (level_override)
    level = *level_override;
  else if (diam > 0)
    level = ceil_log2(diam) + DyadicFamily::kCoveringOffset;

  const int d = family.dimension();
  const int sigma = level_sign(level);
  int system = 0;
  int place = 1;
  for (int j = 0; j < d; ++j) {
    int chosen = -1;
    for (int a = 0; a < 3 && chosen < 0; ++a) {
      const std::int64_t k0 = floor_div(floor_three_scaled(points.front()[j], level) - sigma * a, 3);
      bool same = true;
      for (const auto& p : points) {
        if (floor_div(floor_three_scaled(p[j], level) - sigma * a, 3) != k0) {
          same = false;
          break;
        }
      }
      if (same) chosen = a;
    }
    check_invariant(chosen >= 0, "covering_cube: no shift family contains the set on axis " +
                                     std::to_string(j));
    system += chosen * place;
    place *= 3;
  }
  CoveringResult r;
  r.system = system;
  r.cube = family.cube_of(points.front(), level, system);
  return r;
}

double box_distance(std::span<const double> x, const Box& b, MetricKind metric) {
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double t = 0.0;
    if (x[j] < b.lo[j])
      t = b.lo[j] - x[j];
    else if (x[j] > b.hi[j])
      t = x[j] - b.hi[j];
    if (metric == MetricKind::Linf)
      acc = std::max(acc, t);
    else
      acc += t * t;
  }
  return metric == MetricKind::Linf ? acc : std::sqrt(acc);
}

}  // namespace confpack
