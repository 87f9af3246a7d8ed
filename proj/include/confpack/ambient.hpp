#pragma once

// Ambient space R^d and the Q = 3^d adjacent dyadic hierarchical cube systems.
//
// A level-n cube of system i is 2^n * ([0,1)^d + k + (-1)^n * alpha_i) with
// alpha_i in {0, 1/3, 2/3}^d. The alternating sign makes every system nested:
// a level-n cube lies in exactly one level-(n+1) cube of the same system.
// Cube indices are computed exactly: the boundaries at level n sit on the
// lattice (2^n / 3) * Z, so classification only needs floor(3 * x / 2^n),
// which is evaluated without rounding.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "confpack/common.hpp"

namespace confpack {

inline constexpr int kMaxDim = 6;

enum class MetricKind { Linf, L2 };

std::string to_string(MetricKind m);
MetricKind metric_from_string(const std::string& s);

struct AmbientSpace {
  int dimension = 2;
  MetricKind metric = MetricKind::Linf;
  double ahlfors_lower = 1.0;  // c1
  double ahlfors_upper = 1.0;  // c2

  AmbientSpace() = default;
  AmbientSpace(int d, MetricKind m);
  AmbientSpace(int d, MetricKind m, double c1, double c2);

  double distance(std::span<const double> x, std::span<const double> y) const;
};

/// Volume of the unit ball of R^d under the given metric.
double unit_ball_volume(int d, MetricKind m);

struct CubeKey {
  int system = 0;  // 0-based; the systems are numbered 1..Q in reports
  int level = 0;
  int dim = 0;
  std::array<std::int64_t, kMaxDim> k{};

  friend bool operator==(const CubeKey& a, const CubeKey& b) {
    if (a.system != b.system || a.level != b.level || a.dim != b.dim) return false;
    for (int j = 0; j < a.dim; ++j)
      if (a.k[j] != b.k[j]) return false;
    return true;
  }
};

struct CubeKeyHash {
  std::size_t operator()(const CubeKey& c) const noexcept;
};

/// Axis-aligned half-open box [lo, hi) per coordinate.
struct Box {
  Point lo;
  Point hi;
};

class DyadicFamily {
 public:
  static constexpr int kBase = 2;            // Delta
  static constexpr int kCoveringOffset = 2;  // ell
  static constexpr int kChildStride = kCoveringOffset + 4;  // s

  explicit DyadicFamily(int dimension);

  int dimension() const { return dim_; }
  int system_count() const { return systems_; }
  int child_stride() const { return kChildStride; }

  /// Shift numerator a_j in {0,1,2} (alpha_j = a_j / 3) of system i along axis j.
  int shift_numerator(int system, int axis) const;
  double shift(int system, int axis) const { return shift_numerator(system, axis) / 3.0; }

  CubeKey cube_of(std::span<const double> x, int level, int system) const;
  CubeKey parent(const CubeKey& c) const;
  Box box(const CubeKey& c) const;

  /// Lower and upper box boundary of cube index k on one axis, as integer
  /// multiples of 2^level / 3.
  static std::int64_t lower_third_units(std::int64_t k, int shift_num, int level);

 private:
  int dim_;
  int systems_;
};

inline int level_sign(int level) { return (level % 2 == 0) ? 1 : -1; }

/// floor(3 * x / 2^level), evaluated exactly for finite x.
std::int64_t floor_three_scaled(double x, int level);

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double diameter_linf(std::span<const Point> points);

struct CoveringResult {
  int system = 0;
  CubeKey cube;
};

/// Returns a cube at level ceil(log2 diam_inf(S)) + 2 containing every point.
/// `level_override` is used for singletons (and forced if given).
CoveringResult covering_cube(const DyadicFamily& family, std::span<const Point> points,
                             std::optional<int> level_override = std::nullopt);

/// dist(x, box(c)) in the given metric.
double box_distance(std::span<const double> x, const Box& b, MetricKind metric);

}  // namespace confpack
