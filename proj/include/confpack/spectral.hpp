#pragma once

// Spectrum of the normalized Laplacian I - P for P = D^-1 A, eigenvalue
// counting, Weyl-type constants, ball-carving test functions, and return
// probabilities of the simple random walk.

#include <cstdint>
#include <optional>
#include <vector>

#include "confpack/graph.hpp"
#include "confpack/wgraph.hpp"

namespace confpack {

inline constexpr std::size_t kDenseCap = 4096;

struct SpectrumReport {
  std::size_t n = 0;
  std::vector<double> eigenvalues;  // ascending, 0 = lambda_0 <= ... <= lambda_{n-1}
  std::size_t components = 0;

  /// N_G(lambda) = #{k > 0 : lambda_k <= lambda}; numerically zero modes of
  /// further components are excluded as well.
  std::size_t counting(double lambda) const;
};

/// Dense symmetric eigensolve of D^-1/2 A D^-1/2. Isolated vertices are
/// rejected since P is undefined there.
SpectrumReport spectrum(const Graph& g, std::size_t cap = kDenseCap);

/// Delta_G(k) for k = 0..n: sum of the k largest degrees.
std::vector<std::size_t> degree_profile(const Graph& g);

struct WeylRow {
  std::size_t k = 0;
  double lambda = 0.0;
  double shape = 0.0;  // (Delta(k)/k) log^2(e n / k) (k/n)^(2/d)
  double ratio = 0.0;  // lambda / shape
  double lower_ratio = 0.0;  // lambda / (k/n)^(2/d)
};

struct WeylCheck {
  double d = 2.0;
  double C_emp = 0.0;
  std::size_t C_argmax = 0;
  double c_emp = 0.0;
  std::size_t c_argmin = 0;
  std::vector<WeylRow> per_k;
  // min over lambda in (0, 1] of N_G(lambda) / rhs(lambda) for the two
  // readings of the counting display: log(e/lambda) and (log e)/lambda.
  double counting_const_log_ratio = 0.0;
  double counting_const_inverse = 0.0;
};

WeylCheck weyl_check(const SpectrumReport& s, const Graph& g, double d);

/// Dirichlet energy over degree-weighted squared norm.
double rayleigh(const Graph& g, std::span<const double> f);

struct Bump {
  Vertex center = 0;
  std::vector<std::pair<Vertex, double>> values;  // support, f > 0
  double rayleigh = 0.0;
  double lipschitz_bound = 0.0;  // (16/R^2) sum_{edges at support} len^2 / sum deg f^2
};

struct BumpResult {
  double R = 0.0;
  std::size_t K = 0;
  std::vector<Bump> bumps;
  std::size_t skipped = 0;  // candidates dropped to keep supports non-adjacent
  double max_rayleigh = 0.0;
  std::size_t count() const { return bumps.size(); }
  /// count >= n / (2K)
  bool count_bound_met(std::size_t n) const { return 2 * K * bumps.size() >= n; }

  /// Dense vector of bump i.
  std::vector<double> dense(std::size_t i, std::size_t n) const;
};

/// Greedy carving: tents 1 - 4 dist(x_i, .)/R on B(x_i, R/4), carving
/// B(x_i, R/2) after each. A candidate whose support would touch or neighbor
/// an earlier support is dropped, so supports are pairwise non-adjacent.
BumpResult ball_carving_bumps(const WeightedGraphMetric& m, double R, std::size_t K);

enum class HeatMethod { Auto, Propagation, Spectral, MonteCarlo };

struct HeatOptions {
  HeatMethod method = HeatMethod::Auto;
  std::size_t walks = 1u << 16;
  std::optional<std::uint64_t> seed;  // required for Monte Carlo
  std::size_t cap = kDenseCap;
};

struct HeatPoint {
  std::size_t t = 0;
  double p = 0.0;       // p_{2t}(x, x)
  double stderr_ = 0.0; // zero for exact methods
  bool zero_hits = false;
};

/// p_{2t}(x,x) for t = 1..T. Auto picks the spectral route under the cap and
/// Monte Carlo above it.
std::vector<HeatPoint> heat_kernel(const Graph& g, Vertex x, std::size_t T,
                                   const HeatOptions& opt = {});

struct DimensionFit {
  double dimension = 0.0;
  std::size_t used = 0;
  std::vector<std::size_t> excluded;  // times with zero Monte Carlo hits
};

/// Least-squares slope of -2 log p_{2t} against log t for t in [t_lo, t_hi].
DimensionFit spectral_dim_fit(std::span<const HeatPoint> series, std::size_t t_lo,
                              std::size_t t_hi);

}  // namespace confpack
