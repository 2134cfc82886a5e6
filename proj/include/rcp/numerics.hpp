// Copyright 2026 The rcp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Numerical building blocks shared by the rest of the library: adaptive
// quadrature, monotone bisection, the standard normal law, and the seeded
// generator used for every Monte Carlo path.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

namespace rcp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normal_pdf(double z) {
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

inline double normal_quantile(double p) {
  if (p <= 0.0) return -kInfinity;
  if (p >= 1.0) return kInfinity;
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

namespace detail {

template <class F>
double adaptive_simpson(F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol || m <= a || b <= m) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance
/// `abs_tol`, with Richardson extrapolation on each accepted panel.
///
/// `breaks` are forced subdivision points (kinks, support endpoints); any that
/// fall outside (a, b) are ignored. Every piece is pre-split into a few panels
/// so narrow features are not skipped by the first Simpson estimate.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-9,
                 std::span<const double> breaks = {}) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, abs_tol, breaks);
  std::vector<double> knots{a};
  for (double x : breaks) {
    if (x > a && x < b) knots.push_back(x);
  }
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  constexpr int kPanels = 8;
  constexpr int kMaxDepth = 40;
  const double total = b - a;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double h = (knots[k + 1] - knots[k]) / kPanels;
    for (int j = 0; j < kPanels; ++j) {
      const double lo = knots[k] + j * h;
      const double hi = (j + 1 == kPanels) ? knots[k + 1] : lo + h;
      const double mid = 0.5 * (lo + hi);
      const double flo = f(lo);
      const double fmid = f(mid);
      const double fhi = f(hi);
      const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
      sum += detail::adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole,
                                      abs_tol * (hi - lo) / total, kMaxDepth);
    }
  }
  return sum;
}

template <class F>
double integrate(F&& f, double a, double b, double abs_tol,
                 std::initializer_list<double> breaks) {
  return integrate(f, a, b, abs_tol,
                   std::span<const double>(breaks.begin(), breaks.size()));
}

/// Smallest x in [lo, hi] with `reached(x)` true, for a predicate that is
/// false-then-true on the interval. Returns the right end of the final
/// bracket, so the result always satisfies the predicate when hi does.
template <class Pred>
double bisect_leftmost(Pred&& reached, double lo, double hi,
                       double width = 1e-10) {
  if (reached(lo)) return lo;
  if (!reached(hi)) return hi;
  for (int it = 0; it < 400 && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (reached(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives the seed of an independent stream from (seed, stream index).
/// split_seed(s, i) = splitmix64(s ^ splitmix64(i)); used for every
/// per-task generator so results do not depend on how tasks are scheduled.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

/// 64-bit Mersenne Twister that remembers its seed. `uniform()` is defined
/// bit-for-bit here rather than through std::uniform_real_distribution so
/// streams are reproducible across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Welford accumulator for mean and sample variance.
class RunningStats {
 public:
  void add(double x) {
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
  }

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double stddev() const { return std::sqrt(variance()); }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace rcp
