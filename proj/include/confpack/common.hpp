#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace confpack {

using Point = std::vector<double>;
using Vertex = std::uint32_t;

/// Raised when a precondition on the caller's input is violated.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an internal theorem-backed assertion fails. Firing one of
/// these means the implementation is wrong, not the input.
class AssertionFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input shape is valid but the requested object does not exist.
class DegenerateInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

inline void check_invariant(bool ok, const std::string& what) {
  if (!ok) throw AssertionFailure(what);
}

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double power_mean_mass(std::span<const double> w, double exponent) {
  CompensatedSum acc;
  for (double x : w) acc.add(std::pow(x, exponent));
  return acc.value() / static_cast<double>(w.size());
}

/// Splits [0, n) into contiguous chunks and runs `body(begin, end)` on each
/// chunk from a worker thread. Falls back to the calling thread when only
/// one hardware thread is available.
inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, std::max<std::size_t>(1, n / 16));
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (auto& t : pool) t.join();
}

/// Uniform double in [0, 1) from a 64-bit engine output; platform independent.
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Unbiased-enough bounded integer via multiply-shift; platform independent.
inline std::uint64_t to_bounded(std::uint64_t bits, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * bound) >> 64);
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace confpack
