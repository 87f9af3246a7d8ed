#pragma once

// Discrete uniformizing conformal weights on quasi-packed graphs.
//
// For every cube (C, n) of every dyadic system the level
//     lev(C, n) = max{ j : |(V n C) \ C'| >= 2^j for every level-(n-s) cube C' }
// measures the size of a point cluster that is not seen by any single child
// s levels down. Each cube with a defined level spreads the weight
//     theta(v) = 2^(lev*/d*) / (1 + k - lev*)^(2/d*) * min(2^-n, 1/w0(v))
// over the bodies meeting its 2*tau*2^n neighborhood, where lev* = min(lev, k)
// and d* = max(d, 2). The per-system weight is w0 * (sum theta^d*)^(1/d*) and
// the final weight sums the Q systems, then rescales to unit d*-mass.

#include <optional>
#include <vector>

#include "confpack/ambient.hpp"
#include "confpack/packing.hpp"

namespace confpack {

inline int star_exponent(int d) { return std::max(d, 2); }

/// Levels n for which some cube may have a defined level.
struct LevelWindow {
  int lowest = 0;   // first level with a possibly defined entry
  int highest = 0;  // last such level
};

/// Exact window derived from the point set: below it every cube holds at most
/// one distinct point; above it the partitions of V stop changing.
LevelWindow level_window(std::span<const Point> points, int child_stride);

struct LevelEntry {
  CubeKey cube;
  std::size_t count = 0;  // |V n C| counted with multiplicity
  int level = 0;          // untruncated lev(C, n)
};

class LevelTable {
 public:
  LevelTable(int system, int child_stride, std::size_t vertex_count, int k,
             std::vector<LevelEntry> entries);

  int system() const { return system_; }
  int k() const { return k_; }
  int child_stride() const { return stride_; }
  std::size_t vertex_count() const { return n_; }
  const std::vector<LevelEntry>& entries() const { return entries_; }

  int truncated(const LevelEntry& e) const { return std::min(e.level, k_); }
  /// Histogram of untruncated levels, index j.
  std::vector<std::size_t> level_histogram() const;
  /// Histogram of truncated levels, indices 0..k.
  std::vector<std::size_t> truncated_histogram() const;

  /// max_j count_j * 2^j / (s |V|); the counting lemma bounds this by 2.
  double observed_level_constant() const;
  /// Same for truncated levels; bounded by 4.
  double observed_truncated_constant() const;

  /// Throws AssertionFailure if any level count exceeds its bound.
  void assert_counting_bounds() const;

 private:
  int system_;
  int stride_;
  std::size_t n_;
  int k_;
  std::vector<LevelEntry> entries_;
};

/// Level table of one system; asserts the counting bounds before returning.
LevelTable build_level_table(std::span<const Point> points, const DyadicFamily& family, int system,
                             int k);

/// The theta contribution of cube `e` to vertex body `body`.
double theta(const Body& body, const LevelEntry& e, const LevelTable& table,
             const DyadicFamily& family, double tau, MetricKind metric);

struct ConformalWeight {
  std::vector<double> omega;
  int d_star = 2;
  std::optional<int> k;      // per-scale weight
  std::optional<int> k_max;  // combined weight over k = 3..k_max
  double pre_norm_mass = 0.0;  // (1/|V|) sum omega^d* before rescaling
  double normalization_factor = 1.0;
  int systems = 1;

  /// (1/|V|) sum omega^d*.
  double mass() const;
};

struct WeightOptions {
  /// Hard ceiling on the pre-normalization mass per vertex.
  double mass_ceiling = std::numeric_limits<double>::infinity();
};

struct WeightDiagnostics {
  std::size_t defined_cubes = 0;     // over all systems
  std::size_t max_exceptional = 0;   // max |E_n(C)| over defined cubes
  double level_constant = 0.0;       // max over systems of the observed lemma constant
  LevelWindow window;
};

/// Precomputes the per-system level tables and neighborhood sums once, so
/// weights for many k come at O(|V| * log|V|) each.
class WeightBuilder {
 public:
  WeightBuilder(const QuasiPackedGraph& g, const DyadicFamily& family);

  ConformalWeight build(int k, const WeightOptions& opt = {}) const;
  ConformalWeight combined(int k_max, const WeightOptions& opt = {}) const;

  /// Un-normalized per-system weight omega_P for system i.
  std::vector<double> system_weight(int system, int k) const;

  const WeightDiagnostics& diagnostics() const { return diag_; }
  /// Level table of one system truncated at k; bounds asserted.
  LevelTable table(int system, int k) const;

 private:
  std::size_t n_;
  int d_star_;
  int systems_;
  int stride_;
  int max_level_ = 0;
  std::vector<double> omega0_;
  std::vector<std::vector<LevelEntry>> raw_;
  // accum_[i][v * (max_level_+1) + j]: sum over system-i cubes with level j
  // whose neighborhood meets S_v of min(2^-n, 1/w0(v))^d*.
  std::vector<std::vector<double>> accum_;
  WeightDiagnostics diag_;
};

ConformalWeight build_weight_k(const QuasiPackedGraph& g, const DyadicFamily& family, int k,
                               const WeightOptions& opt = {});

ConformalWeight build_combined(const QuasiPackedGraph& g, const DyadicFamily& family, int k_max,
                               const WeightOptions& opt = {});

/// Rescales `omega` in place to unit d*-mass; returns the factor applied.
double normalize_mass(std::vector<double>& omega, int d_star);

}  // namespace confpack
