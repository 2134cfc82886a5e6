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

// Value laws, robustness noise laws, bidding strategies and the order
// statistics of a market of independent bidders.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rcp/numerics.hpp"

namespace rcp {

enum class ValueFamily { uniform, truncated_lognormal };

/// A bidder's value distribution on a closed interval [lo, hi] of
/// nonnegative reals. The truncated lognormal is renormalized on [lo, hi],
/// not clipped, so its CDF is continuous and strictly increasing.
class ValueDistribution {
 public:
  static ValueDistribution uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("uniform: need 0 <= lo < hi < inf");
    }
    return ValueDistribution(ValueFamily::uniform, 0.0, 1.0, lo, hi);
  }

  static ValueDistribution truncated_lognormal(double mu_log, double sigma_log,
                                               double lo, double hi) {
    if (!std::isfinite(mu_log) || !(sigma_log > 0.0) ||
        !std::isfinite(sigma_log)) {
      throw std::invalid_argument(
          "truncated_lognormal: need finite mu and sigma > 0");
    }
    if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
      throw std::invalid_argument(
          "truncated_lognormal: need 0 <= lo < hi < inf");
    }
    ValueDistribution d(ValueFamily::truncated_lognormal, mu_log, sigma_log,
                        lo, hi);
    if (!(d.mass_ > 0.0)) {
      throw std::invalid_argument(
          "truncated_lognormal: truncation interval carries no mass");
    }
    return d;
  }

  ValueFamily family() const { return family_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mu_log() const { return mu_; }
  double sigma_log() const { return sigma_; }

  double cdf(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    if (family_ == ValueFamily::uniform) return (x - lo_) / (hi_ - lo_);
    const double c = (untruncated_cdf(x) - cdf_lo_) / mass_;
    return std::clamp(c, 0.0, 1.0);
  }

  double pdf(double x) const {
    if (x < lo_ || x > hi_) return 0.0;
    if (family_ == ValueFamily::uniform) return 1.0 / (hi_ - lo_);
    if (x <= 0.0) return 0.0;
    const double z = (std::log(x) - mu_) / sigma_;
    return normal_pdf(z) / (sigma_ * x * mass_);
  }

  /// Smallest x with cdf(x) >= q.
  double quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw std::domain_error("quantile: probability outside [0, 1]");
    }
    if (q == 0.0) return lo_;
    if (q == 1.0) return hi_;
    if (family_ == ValueFamily::uniform) return lo_ + q * (hi_ - lo_);
    const double x = std::exp(mu_ + sigma_ * normal_quantile(cdf_lo_ + q * mass_));
    return std::clamp(x, lo_, hi_);
  }

  /// Inverse-transform draw.
  double sample(Rng& rng) const { return quantile(rng.uniform()); }

  /// The law of c * V for c > 0.
  ValueDistribution scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("scaled: factor must be > 0");
    if (family_ == ValueFamily::uniform) return uniform(c * lo_, c * hi_);
    return truncated_lognormal(mu_ + std::log(c), sigma_, c * lo_, c * hi_);
  }

  double mean() const {
    return lo_ + integrate([this](double x) { return 1.0 - cdf(x); }, lo_, hi_,
                           1e-10);
  }

 private:
  ValueDistribution(ValueFamily family, double mu, double sigma, double lo,
                    double hi)
      : family_(family), mu_(mu), sigma_(sigma), lo_(lo), hi_(hi) {
    if (family_ == ValueFamily::truncated_lognormal) {
      cdf_lo_ = untruncated_cdf(lo_);
      mass_ = untruncated_cdf(hi_) - cdf_lo_;
    }
  }

  double untruncated_cdf(double x) const {
    if (x <= 0.0) return 0.0;
    return normal_cdf((std::log(x) - mu_) / sigma_);
  }

  ValueFamily family_;
  double mu_;
  double sigma_;
  double lo_;
  double hi_;
  double cdf_lo_ = 0.0;
  double mass_ = 1.0;
};

enum class NoiseFamily { laplace, degenerate_zero };

/// Robustness noise F: Laplace(0, 1/epsilon) or the point mass at zero
/// (which is what epsilon = inf means).
class NoiseDistribution {
 public:
  static NoiseDistribution laplace(double epsilon) {
    if (!(epsilon > 0.0)) {
      throw std::invalid_argument("laplace: epsilon must be > 0");
    }
    if (std::isinf(epsilon)) return none();
    return NoiseDistribution(NoiseFamily::laplace, epsilon);
  }

  static NoiseDistribution none() {
    return NoiseDistribution(NoiseFamily::degenerate_zero, kInfinity);
  }

  NoiseFamily family() const { return family_; }
  bool is_degenerate() const { return family_ == NoiseFamily::degenerate_zero; }
  /// Inverse scale; +inf for the degenerate law.
  double epsilon() const { return epsilon_; }
  double scale() const { return is_degenerate() ? 0.0 : 1.0 / epsilon_; }

  double cdf(double x) const {
    if (is_degenerate()) return x >= 0.0 ? 1.0 : 0.0;
    return x < 0.0 ? 0.5 * std::exp(epsilon_ * x)
                   : 1.0 - 0.5 * std::exp(-epsilon_ * x);
  }

  /// Density; zero everywhere for the degenerate law, whose callers
  /// special-case the atom.
  double pdf(double x) const {
    if (is_degenerate()) return 0.0;
    return 0.5 * epsilon_ * std::exp(-epsilon_ * std::abs(x));
  }

  double quantile(double q) const {
    if (!(q > 0.0 && q < 1.0)) {
      throw std::domain_error("noise quantile: probability outside (0, 1)");
    }
    if (is_degenerate()) return 0.0;
    return q < 0.5 ? std::log(2.0 * q) / epsilon_
                   : -std::log(2.0 * (1.0 - q)) / epsilon_;
  }

  /// int_{-inf}^{x} F(t) dt. Expected stage-2 utilities under a noisy
  /// reserve reduce to differences of this function.
  double integrated_cdf(double x) const {
    if (is_degenerate()) return std::max(x, 0.0);
    const double half_scale = 0.5 / epsilon_;
    return x < 0.0 ? half_scale * std::exp(epsilon_ * x)
                   : x + half_scale * std::exp(-epsilon_ * x);
  }

  /// Draws z. The degenerate law consumes no randomness.
  double sample(Rng& rng) const {
    if (is_degenerate()) return 0.0;
    return quantile(rng.uniform());
  }

 private:
  NoiseDistribution(NoiseFamily family, double epsilon)
      : family_(family), epsilon_(epsilon) {}

  NoiseFamily family_;
  double epsilon_;
};

enum class StrategyKind { identity, linear_shading };

/// Weakly increasing stage-1 bidding map beta(v).
class BiddingStrategy {
 public:
  static BiddingStrategy identity() {
    return BiddingStrategy(StrategyKind::identity, 1.0);
  }

  static BiddingStrategy linear_shading(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw std::invalid_argument("linear_shading: alpha must be > 0");
    }
    return BiddingStrategy(StrategyKind::linear_shading, alpha);
  }

  StrategyKind kind() const { return kind_; }
  double alpha() const { return alpha_; }

  double bid(double value) const { return alpha_ * value; }

  /// inf{v >= 0 : beta(v) >= p}; zero for p <= 0.
  double inverse(double p) const { return p <= 0.0 ? 0.0 : p / alpha_; }

 private:
  BiddingStrategy(StrategyKind kind, double alpha) : kind_(kind), alpha_(alpha) {}

  StrategyKind kind_;
  double alpha_;
};

struct Bidder {
  ValueDistribution value;
  BiddingStrategy strategy = BiddingStrategy::identity();
};

/// Independent bidders D = x_i D_i together with their stage-1 strategies.
///
/// Order statistics follow the convention that the maximum over an empty set
/// is 0: with one bidder the second-highest value and the competitor maximum
/// are identically 0, so their CDFs equal 1 on x >= 0.
class MarketProfile {
 public:
  explicit MarketProfile(std::vector<Bidder> bidders)
      : bidders_(std::move(bidders)) {
    if (bidders_.empty()) {
      throw std::invalid_argument("MarketProfile: need at least one bidder");
    }
  }

  static MarketProfile iid(const ValueDistribution& value, std::size_t n) {
    return MarketProfile(std::vector<Bidder>(n, Bidder{value}));
  }

  std::size_t size() const { return bidders_.size(); }
  const Bidder& bidder(std::size_t i) const { return bidders_.at(i); }
  const std::vector<Bidder>& bidders() const { return bidders_; }

  double lo() const {
    double lo = kInfinity;
    for (const auto& b : bidders_) lo = std::min(lo, b.value.lo());
    return lo;
  }

  double hi() const {
    double hi = 0.0;
    for (const auto& b : bidders_) hi = std::max(hi, b.value.hi());
    return hi;
  }

  /// Largest possible stage-1 bid, max_i beta_i(hi_i).
  double max_bid() const {
    double m = 0.0;
    for (const auto& b : bidders_) {
      m = std::max(m, b.strategy.bid(b.value.hi()));
    }
    return m;
  }

  /// Support endpoints of every bidder, for use as quadrature breakpoints.
  std::vector<double> support_points() const {
    std::vector<double> pts;
    for (const auto& b : bidders_) {
      pts.push_back(b.value.lo());
      pts.push_back(b.value.hi());
    }
    return pts;
  }

  MarketProfile with_strategy(std::size_t i, BiddingStrategy s) const {
    MarketProfile copy = *this;
    copy.bidders_.at(i).strategy = s;
    return copy;
  }

  MarketProfile truthful() const {
    MarketProfile copy = *this;
    for (auto& b : copy.bidders_) b.strategy = BiddingStrategy::identity();
    return copy;
  }

  /// D^(1)(x) = prod_i D_i(x).
  double highest_cdf(double x) const {
    double prod = 1.0;
    for (const auto& b : bidders_) prod *= b.value.cdf(x);
    return prod;
  }

  /// D^(2)(x) = prod_i D_i(x) + sum_i (1 - D_i(x)) prod_{j != i} D_j(x).
  double second_highest_cdf(double x) const {
    if (bidders_.size() == 1) return x >= 0.0 ? 1.0 : 0.0;
    double total = highest_cdf(x);
    for (std::size_t i = 0; i < bidders_.size(); ++i) {
      total += (1.0 - bidders_[i].value.cdf(x)) * competitor_max_cdf(i, x);
    }
    return std::min(total, 1.0);
  }

  /// G_i(x) = prod_{j != i} D_j(x).
  double competitor_max_cdf(std::size_t i, double x) const {
    check_index(i);
    if (x < 0.0) return 0.0;
    double prod = 1.0;
    for (std::size_t j = 0; j < bidders_.size(); ++j) {
      if (j != i) prod *= bidders_[j].value.cdf(x);
    }
    return prod;
  }

  /// g_i(x) = sum_{j != i} D_j'(x) prod_{k != i, j} D_k(x). Zero for a
  /// single bidder, whose competitor maximum is the atom at 0.
  double competitor_max_pdf(std::size_t i, double x) const {
    check_index(i);
    double total = 0.0;
    for (std::size_t j = 0; j < bidders_.size(); ++j) {
      if (j == i) continue;
      double term = bidders_[j].value.pdf(x);
      for (std::size_t k = 0; k < bidders_.size(); ++k) {
        if (k != i && k != j) term *= bidders_[k].value.cdf(x);
      }
      total += term;
    }
    return total;
  }

  /// Draws one competitor maximum m_i = max_{j != i} v_j (0 if n = 1).
  double sample_competitor_max(std::size_t i, Rng& rng) const {
    double m = 0.0;
    for (std::size_t j = 0; j < bidders_.size(); ++j) {
      if (j != i) m = std::max(m, bidders_[j].value.sample(rng));
    }
    return m;
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= bidders_.size()) {
      throw std::out_of_range("bidder index " + std::to_string(i) +
                              " out of range for " +
                              std::to_string(bidders_.size()) + " bidders");
    }
  }

  std::vector<Bidder> bidders_;
};

struct OrderStatisticCdfs {
  std::function<double(double)> highest;
  std::function<double(double)> second_highest;
};

inline OrderStatisticCdfs top_order_cdfs(const MarketProfile& profile) {
  return {[profile](double x) { return profile.highest_cdf(x); },
          [profile](double x) { return profile.second_highest_cdf(x); }};
}

inline std::function<double(double)> competitor_max_cdf(
    const MarketProfile& profile, std::size_t i) {
  if (i >= profile.size()) {
    throw std::out_of_range("competitor_max_cdf: bidder index out of range");
  }
  return [profile, i](double x) { return profile.competitor_max_cdf(i, x); };
}

}  // namespace rcp
