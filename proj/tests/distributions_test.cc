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

#include "rcp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace rcp {
namespace {

// Dvoretzky-Kiefer-Wolfowitz band at confidence 1 - 1e-4.
double dkw_band(std::size_t n) { return std::sqrt(std::log(2.0 / 1e-4) / (2.0 * n)); }

template <class Cdf>
double ks_distance(std::vector<double> xs, Cdf&& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double f = cdf(xs[k]);
    d = std::max({d, std::abs(f - k / n), std::abs(f - (k + 1) / n)});
  }
  return d;
}

ValueDistribution default_lognormal() {
  return ValueDistribution::truncated_lognormal(0.0, 0.5, 0.0, 2.5);
}

TEST(ValueDistributionTest, UniformBasics) {
  const auto u = ValueDistribution::uniform(0.2, 1.2);
  EXPECT_EQ(u.cdf(0.2), 0.0);
  EXPECT_EQ(u.cdf(1.2), 1.0);
  EXPECT_DOUBLE_EQ(u.cdf(0.7), 0.5);
  EXPECT_DOUBLE_EQ(u.pdf(0.9), 1.0);
  EXPECT_EQ(u.pdf(1.3), 0.0);
  EXPECT_DOUBLE_EQ(u.quantile(0.25), 0.45);
  EXPECT_NEAR(u.mean(), 0.7, 1e-10);
}

TEST(ValueDistributionTest, LognormalCdfMatchesDirectFormula) {
  const auto d = ValueDistribution::truncated_lognormal(0.3, 0.7, 0.5, 3.0);
  auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  auto raw = [&](double x) { return phi((std::log(x) - 0.3) / 0.7); };
  for (double x : {0.6, 1.0, 1.7, 2.9}) {
    EXPECT_NEAR(d.cdf(x), (raw(x) - raw(0.5)) / (raw(3.0) - raw(0.5)), 1e-14);
  }
  EXPECT_EQ(d.cdf(0.5), 0.0);
  EXPECT_EQ(d.cdf(3.0), 1.0);
}

TEST(ValueDistributionTest, QuantileInvertsCdfInsideSupport) {
  for (const auto& d : {default_lognormal(), ValueDistribution::uniform(0.0, 1.0),
                        ValueDistribution::truncated_lognormal(-1.0, 1.2, 0.05, 4.0)}) {
    for (int k = 1; k < 50; ++k) {
      const double x = d.lo() + (d.hi() - d.lo()) * k / 50.0;
      EXPECT_NEAR(d.quantile(d.cdf(x)), x, 1e-9);
    }
  }
}

TEST(ValueDistributionTest, PdfIntegratesToOneMidpointRule) {
  const auto d = default_lognormal();
  const int m = 1000000;
  const double h = d.hi() / m;
  double total = 0.0;
  for (int k = 0; k < m; ++k) total += d.pdf((k + 0.5) * h) * h;
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(ValueDistributionTest, CdfNondecreasing) {
  const auto d = default_lognormal();
  double prev = 0.0;
  for (int k = 0; k <= 2000; ++k) {
    const double c = d.cdf(-0.1 + 2.7 * k / 2000.0);
    ASSERT_GE(c, prev);
    prev = c;
  }
}

TEST(ValueDistributionTest, SamplesWithinDkwBand) {
  Rng rng(5);
  for (const auto& d : {default_lognormal(), ValueDistribution::uniform(0.3, 0.9)}) {
    std::vector<double> xs(40000);
    for (auto& x : xs) x = d.sample(rng);
    EXPECT_LE(ks_distance(xs, [&](double x) { return d.cdf(x); }), dkw_band(xs.size()));
    EXPECT_GE(*std::min_element(xs.begin(), xs.end()), d.lo());
    EXPECT_LE(*std::max_element(xs.begin(), xs.end()), d.hi());
  }
}

TEST(ValueDistributionTest, ScaledIsLawOfScaledVariable) {
  const auto d = default_lognormal();
  const auto s = d.scaled(0.4);
  EXPECT_DOUBLE_EQ(s.hi(), 1.0);
  for (double x : {0.1, 0.8, 1.3, 2.2}) EXPECT_NEAR(s.cdf(0.4 * x), d.cdf(x), 1e-13);
  EXPECT_NEAR(s.mean(), 0.4 * d.mean(), 1e-9);
}

TEST(ValueDistributionTest, RejectsBadParameters) {
  EXPECT_THROW(ValueDistribution::uniform(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ValueDistribution::uniform(-0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(ValueDistribution::uniform(0.0, kInfinity), std::invalid_argument);
  EXPECT_THROW(ValueDistribution::truncated_lognormal(0.0, 0.0, 0.0, 1.0),
               std::invalid_argument);
  EXPECT_THROW(ValueDistribution::truncated_lognormal(0.0, 0.5, 2.0, 1.0),
               std::invalid_argument);
  EXPECT_THROW(default_lognormal().quantile(1.5), std::domain_error);
  EXPECT_THROW(default_lognormal().scaled(0.0), std::invalid_argument);
}

TEST(NoiseDistributionTest, LaplaceSymmetryAndMedian) {
  const auto f = NoiseDistribution::laplace(2.5);
  EXPECT_EQ(f.cdf(0.0), 0.5);
  for (double x : {0.01, 0.3, 1.0, 7.0}) EXPECT_NEAR(f.cdf(x) + f.cdf(-x), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(f.pdf(0.0), 1.25);
  EXPECT_DOUBLE_EQ(f.scale(), 0.4);
}

TEST(NoiseDistributionTest, LaplaceTailMassProperty) {
  for (double eps : {0.1, 1.0, 12.8}) {
    const auto f = NoiseDistribution::laplace(eps);
    for (double delta : {0.001, 0.05, 0.5, 0.9}) {
      const double t = std::log(1.0 / delta) / eps;
      EXPECT_GE(f.cdf(t) - f.cdf(-t), 1.0 - delta - 1e-12);
    }
  }
}

TEST(NoiseDistributionTest, IntegratedCdfMatchesQuadrature) {
  const auto f = NoiseDistribution::laplace(1.7);
  for (double x : {-3.0, -0.2, 0.0, 0.4, 2.5}) {
    const double num = integrate([&](double z) { return f.cdf(z); }, -60.0, x, 1e-12, {0.0});
    EXPECT_NEAR(f.integrated_cdf(x), num, 1e-9) << x;
  }
  const auto none = NoiseDistribution::none();
  EXPECT_EQ(none.integrated_cdf(-1.0), 0.0);
  EXPECT_EQ(none.integrated_cdf(0.75), 0.75);
}

TEST(NoiseDistributionTest, LaplaceSamplesWithinDkwBand) {
  const auto f = NoiseDistribution::laplace(0.8);
  Rng rng(11);
  std::vector<double> xs(40000);
  for (auto& x : xs) x = f.sample(rng);
  EXPECT_LE(ks_distance(xs, [&](double x) { return f.cdf(x); }), dkw_band(xs.size()));
}

TEST(NoiseDistributionTest, QuantileInvertsCdf) {
  const auto f = NoiseDistribution::laplace(3.0);
  for (double q : {0.001, 0.2, 0.5, 0.8, 0.999}) EXPECT_NEAR(f.cdf(f.quantile(q)), q, 1e-13);
}

TEST(NoiseDistributionTest, DegenerateIsPointMassWithoutDraws) {
  const auto none = NoiseDistribution::laplace(kInfinity);
  EXPECT_TRUE(none.is_degenerate());
  EXPECT_EQ(none.cdf(-1e-12), 0.0);
  EXPECT_EQ(none.cdf(0.0), 1.0);
  Rng a(3), b(3);
  EXPECT_EQ(none.sample(a), 0.0);
  EXPECT_EQ(a(), b());  // no draw consumed
  EXPECT_THROW(NoiseDistribution::laplace(0.0), std::invalid_argument);
  EXPECT_THROW(NoiseDistribution::laplace(-1.0), std::invalid_argument);
}

TEST(BiddingStrategyTest, GeneralizedInverse) {
  const auto s = BiddingStrategy::linear_shading(0.8);
  EXPECT_DOUBLE_EQ(s.bid(2.0), 1.6);
  EXPECT_DOUBLE_EQ(s.inverse(1.6), 2.0);
  EXPECT_EQ(s.inverse(0.0), 0.0);
  EXPECT_EQ(s.inverse(-3.0), 0.0);
  const auto id = BiddingStrategy::identity();
  EXPECT_EQ(id.bid(0.37), 0.37);
  EXPECT_EQ(id.inverse(0.37), 0.37);
  // Weakly increasing, and inf{v : beta(v) >= p} = inverse(p).
  for (double p : {0.1, 0.5, 0.9}) {
    const double v = bisect_leftmost([&](double x) { return s.bid(x) >= p; }, 0.0, 5.0, 1e-13);
    EXPECT_NEAR(s.inverse(p), v, 1e-12);
  }
  EXPECT_THROW(BiddingStrategy::linear_shading(0.0), std::invalid_argument);
}

MarketProfile mixed_profile() {
  return MarketProfile({Bidder{ValueDistribution::uniform(0.0, 1.0)},
                        Bidder{default_lognormal().scaled(0.4)},
                        Bidder{ValueDistribution::uniform(0.2, 0.9)}});
}

TEST(MarketProfileTest, OrderStatisticsMatchSimulation) {
  const auto prof = mixed_profile();
  Rng rng(17);
  const std::size_t n = 40000;
  std::vector<double> top(n), second(n), others(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> v;
    for (const auto& b : prof.bidders()) v.push_back(b.value.sample(rng));
    others[k] = std::max(v[0], v[2]);
    std::sort(v.rbegin(), v.rend());
    top[k] = v[0];
    second[k] = v[1];
  }
  const double band = dkw_band(n);
  EXPECT_LE(ks_distance(top, [&](double x) { return prof.highest_cdf(x); }), band);
  EXPECT_LE(ks_distance(second, [&](double x) { return prof.second_highest_cdf(x); }), band);
  EXPECT_LE(ks_distance(others, [&](double x) { return prof.competitor_max_cdf(1, x); }), band);
}

TEST(MarketProfileTest, ClosedFormOrderStatisticsIid) {
  const auto prof = MarketProfile::iid(ValueDistribution::uniform(0.0, 1.0), 3);
  for (double x : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(prof.highest_cdf(x), x * x * x, 1e-15);
    EXPECT_NEAR(prof.second_highest_cdf(x), 3 * x * x - 2 * x * x * x, 1e-15);
    EXPECT_NEAR(prof.competitor_max_cdf(0, x), x * x, 1e-15);
    EXPECT_NEAR(prof.competitor_max_pdf(0, x), 2 * x, 1e-14);
  }
  const auto fns = top_order_cdfs(prof);
  EXPECT_NEAR(fns.second_highest(0.5), 0.5, 1e-15);
}

TEST(MarketProfileTest, CompetitorMaxSamplerMatchesCdf) {
  const auto prof = mixed_profile();
  Rng rng(23);
  std::vector<double> xs(40000);
  for (auto& x : xs) x = prof.sample_competitor_max(0, rng);
  EXPECT_LE(ks_distance(xs, [&](double x) { return prof.competitor_max_cdf(0, x); }),
            dkw_band(xs.size()));
}

TEST(MarketProfileTest, SingleBidderConventions) {
  const auto prof = MarketProfile::iid(ValueDistribution::uniform(0.0, 1.0), 1);
  EXPECT_EQ(prof.second_highest_cdf(0.0), 1.0);
  EXPECT_EQ(prof.competitor_max_cdf(0, 0.3), 1.0);
  EXPECT_EQ(prof.competitor_max_cdf(0, -0.1), 0.0);
  Rng rng(1);
  EXPECT_EQ(prof.sample_competitor_max(0, rng), 0.0);
}

TEST(MarketProfileTest, StrategiesAndBounds) {
  const auto prof = mixed_profile();
  EXPECT_EQ(prof.size(), 3u);
  EXPECT_DOUBLE_EQ(prof.hi(), 1.0);
  const auto shaded = prof.with_strategy(2, BiddingStrategy::linear_shading(1.5));
  EXPECT_DOUBLE_EQ(shaded.max_bid(), 1.35);
  EXPECT_EQ(shaded.truthful().bidder(2).strategy.kind(), StrategyKind::identity);
  EXPECT_THROW(prof.bidder(3), std::out_of_range);
  EXPECT_THROW(prof.competitor_max_cdf(5, 0.2), std::out_of_range);
  EXPECT_THROW(MarketProfile(std::vector<Bidder>{}), std::invalid_argument);
}

}  // namespace
}  // namespace rcp
