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

// Stage-2 expected revenue, the dynamic IC metric (Monte Carlo and closed
// forms), local sensitivities of the reserve to bid shading, and numerical
// checks of the revenue guarantees.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <stdexcept>
#include <vector>

#include "rcp/clearing.hpp"
#include "rcp/distributions.hpp"
#include "rcp/mechanisms.hpp"
#include "rcp/numerics.hpp"

namespace rcp {

/// Mean with a 95% normal-approximation half-width,
/// 1.96 * sample stddev / sqrt(n_samples).
struct MetricEstimate {
  double mean = 0.0;
  double ci_half_width = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  static MetricEstimate from(const RunningStats& stats, std::uint64_t seed) {
    const auto n = stats.count();
    const double half =
        n > 1 ? 1.96 * stats.stddev() / std::sqrt(static_cast<double>(n)) : 0.0;
    return {stats.mean(), half, n, seed};
  }

  static MetricEstimate from(std::span<const double> samples, std::uint64_t seed) {
    RunningStats stats;
    for (double x : samples) stats.add(x);
    return from(stats, seed);
  }
};

// ---------------------------------------------------------------------------
// Revenue

/// E[v^(1)] = int_0^hi (1 - D^(1)(x)) dx.
inline double expected_highest_value(const MarketProfile& profile) {
  const auto pts = profile.support_points();
  return integrate([&](double x) { return 1.0 - profile.highest_cdf(x); }, 0.0,
                   profile.hi(), 1e-10, pts);
}

/// E[v^(2)] = int_0^hi (1 - D^(2)(x)) dx; zero for a single bidder.
inline double expected_second_value(const MarketProfile& profile) {
  if (profile.size() == 1) return 0.0;
  const auto pts = profile.support_points();
  return integrate([&](double x) { return 1.0 - profile.second_highest_cdf(x); },
                   0.0, profile.hi(), 1e-10, pts);
}

/// Stage-2 revenue of a second-price auction with truthful bidders and fixed
/// reserve r:
///   Rev(r) = r * (1 - D^(1)(r)) + int_r^hi (1 - D^(2)(x)) dx,
/// i.e. the reserve paid whenever v^(2) < r <= v^(1) plus E[v^(2); v^(2) >= r].
/// For one bidder it is r * (1 - D(r)).
inline double expected_revenue_closed(const MarketProfile& profile,
                                      double reserve) {
  const double hi = profile.hi();
  if (reserve >= hi) return 0.0;
  const double r = std::max(reserve, 0.0);
  double tail = 0.0;
  if (profile.size() > 1) {
    const auto pts = profile.support_points();
    tail = integrate([&](double x) { return 1.0 - profile.second_highest_cdf(x); },
                     r, hi, 1e-10, pts);
  }
  return r * (1.0 - profile.highest_cdf(r)) + tail;
}

/// Monte Carlo revenue: per sample, truthful values are drawn in bidder
/// order, then `reserve_sampler(rng)` supplies that auction's reserve.
template <class ReserveSampler>
MetricEstimate expected_revenue_mc(const MarketProfile& profile,
                                   ReserveSampler&& reserve_sampler,
                                   std::size_t n_samples, Rng& rng) {
  if (n_samples < 2) throw std::invalid_argument("expected_revenue_mc: need >= 2 samples");
  std::vector<double> values(profile.size());
  RunningStats stats;
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = profile.bidder(i).value.sample(rng);
    }
    const double reserve = reserve_sampler(rng);
    stats.add(run_auction(values, reserve).payment);
  }
  return MetricEstimate::from(stats, rng.seed());
}

/// E_z[Rev(max(p + z, 0))] for the population clearing price p of `profile`
/// (whose strategies are the stage-1 strategies). The clamp contributes the
/// atom Rev(0) * F(-p); reserves at or above hi earn nothing.
inline double dp_rcp_expected_revenue(const MarketProfile& profile, double lambda,
                                      const NoiseDistribution& noise) {
  const double p = oracle_clearing_price(profile, lambda);
  if (noise.is_degenerate()) return expected_revenue_closed(profile, p);
  const MarketProfile values = profile.truthful();
  std::vector<double> breaks{0.0};
  for (double s : values.support_points()) breaks.push_back(s - p);
  const double body = integrate(
      [&](double z) { return expected_revenue_closed(values, p + z) * noise.pdf(z); },
      -p, values.hi() - p, 1e-8, breaks);
  return expected_revenue_closed(values, 0.0) * noise.cdf(-p) + body;
}

// ---------------------------------------------------------------------------
// Dynamic IC metric

/// E[v_i * G_i(v_i)]: bidder i's stage-1 surplus scale under truthful
/// bidding with no reserve.
inline double truthful_win_value(const MarketProfile& profile, std::size_t i) {
  const auto& d = profile.bidder(i).value;
  const auto pts = profile.support_points();
  return integrate(
      [&](double v) { return v * d.pdf(v) * profile.competitor_max_cdf(i, v); },
      d.lo(), d.hi(), 1e-10, pts);
}

namespace detail {

struct ShadedReserves {
  double up;
  double down;
};

inline ShadedReserves shaded_population_reserves(const MechanismConfig& config,
                                                 const MarketProfile& truthful,
                                                 std::size_t i, double alpha) {
  const auto up = truthful.with_strategy(i, BiddingStrategy::linear_shading(1.0 + alpha));
  const auto down = truthful.with_strategy(i, BiddingStrategy::linear_shading(1.0 - alpha));
  if (config.kind == MechanismKind::srcp) {
    return {smoothed_oracle_reserve(up, config.noise, config.lambda),
            smoothed_oracle_reserve(down, config.noise, config.lambda)};
  }
  return {oracle_clearing_price(up, config.lambda),
          oracle_clearing_price(down, config.lambda)};
}

}  // namespace detail

/// Finite-alpha dynamic IC metric of bidder i,
///   1 + (E u2(1 + alpha) - E u2(1 - alpha)) / (2 alpha E[v_i G_i(v_i)]),
/// where u2 is bidder i's stage-2 utility when the reserve was fitted to
/// stage-1 bids in which only bidder i shaded by the given factor.
///
/// Shaded reserves come from the population oracles. For dp_rcp and no_noise
/// the noise is integrated out exactly: with reserve max(p + z, 0) and
/// competitor maximum m <= v, E_z[utility] = Psi(v - p) - Psi(m - p) with Psi
/// the integrated noise CDF. Both branches share the same (v_i, m_i) draws.
inline MetricEstimate ic_metric_mc(const MechanismConfig& config,
                                   const MarketProfile& profile, std::size_t i,
                                   double alpha, std::size_t n_samples, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("ic_metric_mc: alpha outside (0, 1)");
  }
  if (n_samples < 2) throw std::invalid_argument("ic_metric_mc: need >= 2 samples");
  if (i >= profile.size()) throw std::out_of_range("ic_metric_mc: bidder index");
  const MarketProfile truthful = profile.truthful();
  const auto reserves = detail::shaded_population_reserves(config, truthful, i, alpha);
  const double scale = 2.0 * alpha * truthful_win_value(truthful, i);
  const auto& own = truthful.bidder(i).value;

  const bool fixed_reserve = config.kind == MechanismKind::srcp;
  const NoiseDistribution noise = config.kind == MechanismKind::dp_rcp
                                      ? config.noise
                                      : NoiseDistribution::none();
  auto utility = [&](double v, double m, double price) {
    if (v < m) return 0.0;
    if (fixed_reserve) {
      const double pay = std::max(m, price);
      return v >= pay ? v - pay : 0.0;
    }
    return noise.integrated_cdf(v - price) - noise.integrated_cdf(m - price);
  };

  RunningStats diff;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double v = own.sample(rng);
    const double m = truthful.sample_competitor_max(i, rng);
    diff.add(utility(v, m, reserves.up) - utility(v, m, reserves.down));
  }
  const auto raw = MetricEstimate::from(diff, rng.seed());
  return {1.0 + raw.mean / scale, raw.ci_half_width / scale, n_samples, rng.seed()};
}

enum class EtaForm {
  all_bidders,       // p D_i'(p) / (D_i'(p) + sum_{j != i} D_j'(p))
  competitors_only,  // p D_i'(p) / sum_{j != i} D_j'(p); kept for negative checks
};

/// Local sensitivity eta = d p*(alpha)/d alpha at alpha = 1 of the population
/// clearing price when bidder i alone shades by alpha.
inline double local_sensitivity_eta(const MarketProfile& profile, double lambda,
                                    std::size_t i, EtaForm form = EtaForm::all_bidders) {
  const MarketProfile truthful = profile.truthful();
  if (i >= truthful.size()) throw std::out_of_range("eta: bidder index");
  const double p = oracle_clearing_price(truthful, lambda);
  if (p == 0.0) return 0.0;  // pinned at zero for every nearby alpha
  const double own = truthful.bidder(i).value.pdf(p);
  double others = 0.0;
  for (std::size_t j = 0; j < truthful.size(); ++j) {
    if (j != i) others += truthful.bidder(j).value.pdf(p);
  }
  const double denom = form == EtaForm::all_bidders ? own + others : others;
  if (!(denom > 0.0)) {
    throw std::domain_error("eta: zero density at the clearing price");
  }
  return p * own / denom;
}

/// Central difference (p*(1 + h) - p*(1 - h)) / 2h of the population
/// clearing price when bidder i alone shades by the factor.
inline double eta_finite_difference(const MarketProfile& profile, double lambda,
                                    std::size_t i, double h = 1e-4) {
  const MarketProfile truthful = profile.truthful();
  auto price = [&](double a) {
    return oracle_clearing_price(
        truthful.with_strategy(i, BiddingStrategy::linear_shading(a)), lambda);
  };
  return (price(1.0 + h) - price(1.0 - h)) / (2.0 * h);
}

/// Closed-form IC metric of the DP mechanism for bidder i:
///   1 - eta * int_0^hi G_i(m) (1 - D_i(m)) f(m - p) dm / E[v_i G_i(v_i)],
/// the inner factor being E_{v_i}[int_0^{v_i} G_i(m) f(m - p) dm] after
/// exchanging the order of integration.
inline double ic_metric_dp_closed(const MarketProfile& profile, double lambda,
                                  const NoiseDistribution& noise, std::size_t i) {
  const MarketProfile truthful = profile.truthful();
  const double eta = local_sensitivity_eta(truthful, lambda, i);
  if (eta == 0.0) return 1.0;
  const double p = oracle_clearing_price(truthful, lambda);
  const auto& own = truthful.bidder(i).value;
  double exposure = 0.0;
  if (noise.is_degenerate()) {
    exposure = truthful.competitor_max_cdf(i, p) * (1.0 - own.cdf(p));
  } else {
    std::vector<double> breaks = truthful.support_points();
    breaks.push_back(p);
    exposure = integrate(
        [&](double m) {
          return truthful.competitor_max_cdf(i, m) * (1.0 - own.cdf(m)) *
                 noise.pdf(m - p);
        },
        0.0, truthful.hi(), 1e-10, breaks);
  }
  return 1.0 - eta * exposure / truthful_win_value(truthful, i);
}

enum class ZetaBranch { interior, boundary, zero };

enum class ZetaForm {
  shading_bidder,  // numerator over bidder i only: the derivative of r*(alpha)
  all_bidders,     // numerator summed over every bidder; kept for negative checks
};

struct ZetaResult {
  double zeta = 0.0;
  double kappa = 0.0;    // sum_j E[F(-v_j)]
  double reserve = 0.0;  // r*(1)
  ZetaBranch branch = ZetaBranch::interior;
};

/// Sensitivity of the smoothed reserve to bidder i's shading, averaged over
/// the one-sided derivatives at alpha = 1. Branches on kappa against
/// n - lambda (equality within 1e-12): zero above, half at equality.
inline ZetaResult local_sensitivity_zeta(const MarketProfile& profile, double lambda,
                                         const NoiseDistribution& noise, std::size_t i,
                                         ZetaForm form = ZetaForm::shading_bidder) {
  const MarketProfile truthful = profile.truthful();
  if (i >= truthful.size()) throw std::out_of_range("zeta: bidder index");
  check_lambda(lambda, truthful.size());
  ZetaResult out;
  const double target = static_cast<double>(truthful.size()) - lambda;
  out.kappa = smoothed_bid_mass(truthful, noise, 0.0);
  out.reserve = smoothed_oracle_reserve(truthful, noise, lambda);
  if (std::abs(out.kappa - target) <= 1e-12) {
    out.branch = ZetaBranch::boundary;
  } else if (out.kappa > target) {
    out.branch = ZetaBranch::zero;
    return out;
  }
  const double r = out.reserve;
  auto weighted = [&](const ValueDistribution& d, bool times_value) {
    if (noise.is_degenerate()) return (times_value ? r : 1.0) * d.pdf(r);
    return integrate(
        [&](double v) { return (times_value ? v : 1.0) * noise.pdf(r - v) * d.pdf(v); },
        d.lo(), d.hi(), 1e-11, {r});
  };
  double numer = 0.0;
  double denom = 0.0;
  for (std::size_t j = 0; j < truthful.size(); ++j) {
    const auto& d = truthful.bidder(j).value;
    denom += weighted(d, false);
    if (j == i || form == ZetaForm::all_bidders) numer += weighted(d, true);
  }
  if (numer == 0.0) return out;
  if (!(denom > 0.0)) throw std::domain_error("zeta: zero noise density mass at reserve");
  out.zeta = numer / denom;
  if (out.branch == ZetaBranch::boundary) out.zeta *= 0.5;
  return out;
}

/// Symmetric difference (r*(1 + h) - r*(1 - h)) / 2h of the smoothed
/// reserve, the average of its one-sided derivatives at alpha = 1.
inline double zeta_finite_difference(const MarketProfile& profile, double lambda,
                                     const NoiseDistribution& noise, std::size_t i,
                                     double h = 1e-4) {
  const MarketProfile truthful = profile.truthful();
  auto reserve = [&](double a) {
    return smoothed_oracle_reserve(
        truthful.with_strategy(i, BiddingStrategy::linear_shading(a)), noise, lambda);
  };
  return (reserve(1.0 + h) - reserve(1.0 - h)) / (2.0 * h);
}

/// Closed-form IC metric of the smoothing mechanism for bidder i:
///   1 - zeta * G_i(r) * (1 - D_i(r)) / E[v_i G_i(v_i)].
inline double ic_metric_srcp_closed(const MarketProfile& profile, double lambda,
                                    const NoiseDistribution& noise, std::size_t i,
                                    ZetaForm form = ZetaForm::shading_bidder) {
  const MarketProfile truthful = profile.truthful();
  const auto z = local_sensitivity_zeta(truthful, lambda, noise, i, form);
  if (z.zeta == 0.0) return 1.0;
  const double r = z.reserve;
  const double exposure =
      truthful.competitor_max_cdf(i, r) * (1.0 - truthful.bidder(i).value.cdf(r));
  return 1.0 - z.zeta * exposure / truthful_win_value(truthful, i);
}

// ---------------------------------------------------------------------------
// Lipschitz constants and revenue guarantees

/// Max absolute slope of D^(1) and D^(2) over a uniform grid on [0, hi].
inline double estimate_order_lipschitz(const MarketProfile& profile,
                                       std::size_t grid = 10000) {
  const double hi = profile.hi();
  const double h = hi / static_cast<double>(grid);
  double best = 0.0;
  double d1_prev = profile.highest_cdf(0.0);
  double d2_prev = profile.second_highest_cdf(0.0);
  for (std::size_t k = 1; k <= grid; ++k) {
    const double x = k == grid ? hi : static_cast<double>(k) * h;
    const double d1 = profile.highest_cdf(x);
    const double d2 = profile.second_highest_cdf(x);
    best = std::max({best, std::abs(d1 - d1_prev) / h, std::abs(d2 - d2_prev) / h});
    d1_prev = d1;
    d2_prev = d2;
  }
  return best;
}

/// Lipschitz constant of gamma, the inverse of S(p) = sum_i D_i(beta_i^{-1}(p)).
/// gamma is tabulated on `grid` + 1 equally spaced levels of [y_lo, y_hi]
/// (default [0, n]) by bisection; mu is the largest consecutive slope.
/// Throws if S is flat anywhere strictly inside the level range.
inline double estimate_gamma_lipschitz(const MarketProfile& profile,
                                       std::size_t grid = 10000, double y_lo = 0.0,
                                       double y_hi = -1.0) {
  const double n = static_cast<double>(profile.size());
  if (y_hi < 0.0) y_hi = n;
  if (!(y_lo >= 0.0 && y_hi <= n && y_lo < y_hi)) {
    throw std::invalid_argument("gamma Lipschitz: bad level range");
  }
  const double top = profile.max_bid();
  {
    double prev = bid_mass_below(profile, 0.0);
    for (std::size_t k = 1; k <= grid; ++k) {
      const double cur = bid_mass_below(profile, top * static_cast<double>(k) / grid);
      if (prev > y_lo && cur < y_hi && !(cur > prev)) {
        throw std::domain_error("gamma Lipschitz: bid mass is flat near level " +
                                std::to_string(cur));
      }
      prev = cur;
    }
  }
  auto gamma = [&](double y) {
    return bisect_leftmost([&](double p) { return bid_mass_below(profile, p) >= y; },
                           0.0, top, 1e-13);
  };
  const double dy = (y_hi - y_lo) / static_cast<double>(grid);
  double best = 0.0;
  double prev = gamma(y_lo);
  for (std::size_t k = 1; k <= grid; ++k) {
    const double cur = gamma(k == grid ? y_hi : y_lo + static_cast<double>(k) * dy);
    best = std::max(best, (cur - prev) / dy);
    prev = cur;
  }
  return best;
}

struct DpBoundCheck {
  double violation_rate = 0.0;
  double allowed_rate = 0.0;  // delta + 3 sqrt(delta (1 - delta) / trials)
  double clearing_revenue = 0.0;
  double revenue_floor = 0.0;  // Rev(p) - (3L + 4) ln(1/delta) / epsilon
  std::size_t trials = 0;

  bool passed() const { return violation_rate <= allowed_rate; }
};

/// Draws `n_trials` noise values and reports how often
/// Rev(max(p + z, 0)) < Rev(p) - (3L + 4) ln(1/delta) / epsilon.
inline DpBoundCheck validate_dp_revenue_bound(const MarketProfile& profile,
                                              double lambda,
                                              const NoiseDistribution& noise,
                                              double delta, double lipschitz,
                                              std::size_t n_trials, Rng& rng) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta outside (0, 1)");
  if (n_trials == 0) throw std::invalid_argument("need >= 1 trial");
  DpBoundCheck out;
  const double p = oracle_clearing_price(profile, lambda);
  const MarketProfile values = profile.truthful();
  out.clearing_revenue = expected_revenue_closed(values, p);
  const double slack = noise.is_degenerate()
                           ? 0.0
                           : (3.0 * lipschitz + 4.0) * std::log(1.0 / delta) / noise.epsilon();
  out.revenue_floor = out.clearing_revenue - slack;
  std::size_t violations = 0;
  for (std::size_t t = 0; t < n_trials; ++t) {
    const double r = std::max(p + noise.sample(rng), 0.0);
    if (expected_revenue_closed(values, r) < out.revenue_floor) ++violations;
  }
  out.trials = n_trials;
  out.violation_rate = static_cast<double>(violations) / static_cast<double>(n_trials);
  out.allowed_rate = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / n_trials);
  return out;
}

struct SmoothedBoundCheck {
  double smoothed_reserve = 0.0;
  double clearing_price = 0.0;
  double smoothed_revenue = 0.0;
  double clearing_revenue = 0.0;
  double allowance = 0.0;  // (6L + 8) sqrt(mu max(n - lambda, lambda) / epsilon)

  bool passed() const { return smoothed_revenue >= clearing_revenue - allowance - 1e-12; }
};

/// Deterministic check Rev(r^s) >= Rev(p^c) - (6L + 8) sqrt(mu max(n - lambda,
/// lambda) / epsilon) under Laplace(0, 1/epsilon) training noise.
inline SmoothedBoundCheck check_srcp_revenue_bound(const MarketProfile& profile,
                                                   double lambda, double epsilon,
                                                   double lipschitz, double mu) {
  SmoothedBoundCheck out;
  const auto noise = NoiseDistribution::laplace(epsilon);
  const MarketProfile values = profile.truthful();
  out.clearing_price = oracle_clearing_price(profile, lambda);
  out.smoothed_reserve = smoothed_oracle_reserve(profile, noise, lambda);
  out.clearing_revenue = expected_revenue_closed(values, out.clearing_price);
  out.smoothed_revenue = expected_revenue_closed(values, out.smoothed_reserve);
  const double spread =
      std::max(static_cast<double>(profile.size()) - lambda, lambda);
  out.allowance = std::isinf(epsilon)
                      ? 0.0
                      : (6.0 * lipschitz + 8.0) * std::sqrt(mu * spread / epsilon);
  return out;
}

}  // namespace rcp
