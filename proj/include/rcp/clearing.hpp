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

// The clearing loss, its exact empirical minimizer, and the population
// clearing price / smoothed reserve oracles.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcp/distributions.hpp"
#include "rcp/numerics.hpp"

namespace rcp {

/// K bid profiles of n bids each, stored row-major. Bids may be negative
/// after smoothing noise has been added.
class BidBatch {
 public:
  explicit BidBatch(std::size_t n_bidders) : n_(n_bidders) {
    if (n_ == 0) throw std::invalid_argument("BidBatch: need n >= 1");
  }

  std::size_t bidders() const { return n_; }
  std::size_t size() const { return bids_.size() / n_; }
  bool empty() const { return bids_.empty(); }

  void reserve(std::size_t profiles) { bids_.reserve(profiles * n_); }

  void add(std::span<const double> profile) {
    if (profile.size() != n_) {
      throw std::invalid_argument("BidBatch: profile has " +
                                  std::to_string(profile.size()) +
                                  " bids, expected " + std::to_string(n_));
    }
    bids_.insert(bids_.end(), profile.begin(), profile.end());
  }

  std::span<const double> profile(std::size_t k) const {
    return std::span<const double>(bids_).subspan(k * n_, n_);
  }

  std::span<const double> pooled() const { return bids_; }
  std::span<double> pooled_mutable() { return bids_; }

 private:
  std::size_t n_;
  std::vector<double> bids_;
};

inline void check_lambda(double lambda, std::size_t n) {
  if (!(lambda >= 0.0) || lambda > static_cast<double>(n)) {
    throw std::invalid_argument("lambda " + std::to_string(lambda) +
                                " outside [0, " + std::to_string(n) + "]");
  }
}

/// l(p, b; lambda) = sum_i max(b_i - p, 0) + lambda * p.
inline double clearing_loss(double p, std::span<const double> bids,
                            double lambda) {
  double loss = lambda * p;
  for (double b : bids) loss += std::max(b - p, 0.0);
  return loss;
}

inline double empirical_clearing_loss(double p, const BidBatch& batch,
                                      double lambda) {
  if (batch.empty()) throw std::invalid_argument("empty bid batch");
  double hinge = 0.0;
  for (double b : batch.pooled()) hinge += std::max(b - p, 0.0);
  return hinge / static_cast<double>(batch.size()) + lambda * p;
}

/// Exact minimizer of (1/K) sum_k l(p, b^(k); lambda) over p >= 0.
///
/// The right derivative at p is lambda - #{pooled bids > p} / K, so the
/// minimizers are the p with #{bids > p} <= lambda*K. With m = floor(lambda*K)
/// the leftmost one is the (m+1)-th largest pooled bid; if m covers every bid
/// the loss is flat to the left and the result is 0.
inline double empirical_clearing_price(const BidBatch& batch, double lambda) {
  if (batch.empty()) throw std::invalid_argument("empty bid batch");
  check_lambda(lambda, batch.bidders());
  const double target = lambda * static_cast<double>(batch.size());
  const auto m = static_cast<std::size_t>(
      std::floor(target + 1e-9 * std::max(1.0, target)));
  std::vector<double> bids(batch.pooled().begin(), batch.pooled().end());
  if (m >= bids.size()) return 0.0;
  std::nth_element(bids.begin(), bids.begin() + static_cast<std::ptrdiff_t>(m),
                   bids.end(), std::greater<>());
  return std::max(bids[m], 0.0);
}

/// sum_i D_i(beta_i^{-1}(p)): expected number of stage-1 bids at or below p.
inline double bid_mass_below(const MarketProfile& profile, double p) {
  double total = 0.0;
  for (const auto& b : profile.bidders()) {
    total += b.value.cdf(b.strategy.inverse(p));
  }
  return total;
}

/// Population clearing price: leftmost root of
/// sum_i D_i(beta_i^{-1}(p)) = n - lambda on [0, max_i beta_i(hi)].
inline double oracle_clearing_price(const MarketProfile& profile,
                                    double lambda) {
  check_lambda(lambda, profile.size());
  const double target = static_cast<double>(profile.size()) - lambda;
  return bisect_leftmost(
      [&](double p) { return bid_mass_below(profile, p) >= target; }, 0.0,
      profile.max_bid(), 1e-10);
}

/// E[F(p - beta_i(v_i))] for one bidder, by quadrature over v_i.
inline double smoothed_bid_cdf(const Bidder& bidder,
                               const NoiseDistribution& noise, double p) {
  const auto& value = bidder.value;
  if (noise.is_degenerate()) return value.cdf(bidder.strategy.inverse(p));
  const double kink = bidder.strategy.inverse(p);
  return integrate(
      [&](double v) { return noise.cdf(p - bidder.strategy.bid(v)) * value.pdf(v); },
      value.lo(), value.hi(), 1e-10, {kink});
}

/// int D_i(beta_i^{-1}(p - z)) f(z) dz for one bidder, by quadrature over
/// the noise with the generalized inverse vanishing at nonpositive bids.
inline double shifted_bid_cdf(const Bidder& bidder,
                              const NoiseDistribution& noise, double p) {
  const auto& value = bidder.value;
  if (noise.is_degenerate()) return value.cdf(bidder.strategy.inverse(p));
  const double z_top = p - bidder.strategy.bid(value.hi());
  const double z_bottom = p - bidder.strategy.bid(value.lo());
  const double below =
      noise.cdf(z_top);  // z < z_top puts every bid under p - z
  const double interior = integrate(
      [&](double z) {
        return value.cdf(bidder.strategy.inverse(p - z)) * noise.pdf(z);
      },
      z_top, z_bottom, 1e-10, {0.0});
  // Past z_bottom the shifted price is below every bid; only an atom of D_i
  // at its lower end (none for the supported families) would contribute.
  const double above = value.cdf(bidder.strategy.inverse(p - z_bottom)) *
                       (1.0 - noise.cdf(z_bottom));
  return below + interior + above;
}

enum class SmoothedRoute { bid_noise, shifted_cdf };

/// sum_i of the per-bidder smoothed CDF along either algebraic route.
inline double smoothed_bid_mass(const MarketProfile& profile,
                                const NoiseDistribution& noise, double p,
                                SmoothedRoute route = SmoothedRoute::bid_noise) {
  double total = 0.0;
  for (const auto& b : profile.bidders()) {
    total += route == SmoothedRoute::bid_noise ? smoothed_bid_cdf(b, noise, p)
                                               : shifted_bid_cdf(b, noise, p);
  }
  return total;
}

/// Smoothed reserve along one route: 0 when the smoothed bid mass at 0
/// already reaches n - lambda, otherwise the root of the monotone equation.
inline double smoothed_reserve_by(const MarketProfile& profile,
                                  const NoiseDistribution& noise,
                                  double lambda, SmoothedRoute route) {
  check_lambda(lambda, profile.size());
  const double target = static_cast<double>(profile.size()) - lambda;
  if (smoothed_bid_mass(profile, noise, 0.0, route) >= target) return 0.0;
  const double upper = profile.max_bid() + 10.0 * noise.scale();
  return bisect_leftmost(
      [&](double p) { return smoothed_bid_mass(profile, noise, p, route) >= target; },
      0.0, upper, 1e-10);
}

/// Population reserve of the smoothing mechanism. Solved on the bid-noise
/// form and, when `cross_check` is set, re-solved on the shifted-CDF form;
/// disagreement beyond 1e-6 is reported as an error.
inline double smoothed_oracle_reserve(const MarketProfile& profile,
                                      const NoiseDistribution& noise,
                                      double lambda, bool cross_check = true) {
  const double r =
      smoothed_reserve_by(profile, noise, lambda, SmoothedRoute::bid_noise);
  if (cross_check) {
    const double alt =
        smoothed_reserve_by(profile, noise, lambda, SmoothedRoute::shifted_cdf);
    if (std::abs(alt - r) > 1e-6) {
      throw std::runtime_error("smoothed reserve routes disagree: " +
                               std::to_string(r) + " vs " + std::to_string(alt));
    }
  }
  return r;
}

/// Deterministic bound on |r^s - p^c| for Laplace noise:
/// ln(1/delta)/epsilon + mu*delta*max(n - lambda, lambda)/(1 - delta).
inline double reserve_gap_bound(std::size_t n, double lambda, double epsilon,
                                double delta, double mu) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("reserve_gap_bound: delta outside (0, 1)");
  }
  const double noise_term =
      std::isinf(epsilon) ? 0.0 : std::log(1.0 / delta) / epsilon;
  const double spread = std::max(static_cast<double>(n) - lambda, lambda);
  return noise_term + mu * delta * spread / (1.0 - delta);
}

}  // namespace rcp
