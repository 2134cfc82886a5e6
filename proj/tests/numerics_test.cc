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

#include "rcp/numerics.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace rcp {
namespace {

TEST(IntegrateTest, PolynomialsAreExact) {
  EXPECT_NEAR(integrate([](double x) { return 3 * x * x; }, 0.0, 2.0), 8.0, 1e-12);
  EXPECT_NEAR(integrate([](double x) { return x * x * x - x; }, -1.0, 3.0),
              (81.0 / 4 - 9.0 / 2) - (1.0 / 4 - 1.0 / 2), 1e-11);
}

TEST(IntegrateTest, ReversedBoundsFlipSign) {
  auto f = [](double x) { return std::exp(x); };
  EXPECT_NEAR(integrate(f, 1.0, 0.0), -(std::exp(1.0) - 1.0), 1e-10);
  EXPECT_EQ(integrate(f, 0.5, 0.5), 0.0);
}

TEST(IntegrateTest, KinkAtBreakpoint) {
  // int_0^1 |x - 0.3| dx = (0.3^2 + 0.7^2) / 2.
  auto f = [](double x) { return std::abs(x - 0.3); };
  EXPECT_NEAR(integrate(f, 0.0, 1.0, 1e-12, {0.3}), 0.29, 1e-12);
}

TEST(IntegrateTest, JumpNeedsBreakpoint) {
  auto step = [](double x) { return x < 0.4137 ? 0.0 : 1.0; };
  EXPECT_NEAR(integrate(step, 0.0, 1.0, 1e-12, {0.4137}), 1.0 - 0.4137, 1e-12);
}

TEST(IntegrateTest, BreakpointsOutsideRangeIgnored) {
  auto f = [](double x) { return std::sin(x); };
  EXPECT_NEAR(integrate(f, 0.0, M_PI, 1e-10, {-1.0, 5.0, 0.0}), 2.0, 1e-10);
}

TEST(IntegrateTest, SharpPeakResolved) {
  // Narrow Gaussian bump carrying unit mass; its location is a break point.
  const double s = 1e-3;
  auto f = [s](double x) { return normal_pdf((x - 0.61) / s) / s; };
  EXPECT_NEAR(integrate(f, 0.0, 1.0, 1e-10, {0.61}), 1.0, 1e-8);
}

TEST(NormalTest, QuantileInvertsCdf) {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-9}) {
    // Independent oracle: bisection on the CDF, or on the upper tail mass
    // above the median where 1 - cdf cancels.
    const double q = 1.0 - p;
    const double x = bisect_leftmost(
        [p, q](double z) {
          return p <= 0.5 ? normal_cdf(z) >= p : 0.5 * std::erfc(z / std::sqrt(2.0)) <= q;
        },
        -40.0, 40.0, 1e-13);
    EXPECT_NEAR(normal_quantile(p), x, 1e-9 * std::max(1.0, std::abs(x))) << p;
  }
  EXPECT_EQ(normal_quantile(0.0), -kInfinity);
  EXPECT_EQ(normal_quantile(1.0), kInfinity);
}

TEST(NormalTest, PdfIntegratesToOne) {
  EXPECT_NEAR(integrate([](double z) { return normal_pdf(z); }, -12.0, 12.0, 1e-12), 1.0,
              1e-10);
}

TEST(BisectTest, FindsThreshold) {
  const double t = 0.123456789;
  const double x = bisect_leftmost([t](double v) { return v >= t; }, 0.0, 1.0, 1e-12);
  EXPECT_GE(x, t);
  EXPECT_LE(x - t, 1e-12);
}

TEST(BisectTest, EndpointCases) {
  EXPECT_EQ(bisect_leftmost([](double) { return true; }, 2.0, 3.0), 2.0);
  EXPECT_EQ(bisect_leftmost([](double) { return false; }, 2.0, 3.0), 3.0);
}

TEST(BisectTest, LeftmostOfPlateau) {
  // Predicate true from 0.25 on; bisection lands on the left edge.
  const double x = bisect_leftmost([](double v) { return std::min(v, 0.25) >= 0.25; },
                                   0.0, 1.0, 1e-11);
  EXPECT_NEAR(x, 0.25, 1e-11);
}

TEST(SeedTest, SplitStreamsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(split_seed(42, s));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(split_seed(1, 2), split_seed(2, 1));
  EXPECT_EQ(split_seed(7, 3), split_seed(7, 3));
}

TEST(RngTest, ReproducibleAndOpenUnitInterval) {
  Rng a(99), b(99);
  RunningStats stats;
  for (int i = 0; i < 100000; ++i) {
    const double u = a.uniform();
    ASSERT_EQ(u, b.uniform());
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    stats.add(u);
  }
  EXPECT_NEAR(stats.mean(), 0.5, 4 * std::sqrt(1.0 / 12 / 100000));
  EXPECT_NEAR(stats.variance(), 1.0 / 12, 2e-3);
  EXPECT_EQ(a.seed(), 99u);
}

TEST(RunningStatsTest, MatchesTwoPass) {
  const std::vector<double> xs{3.1, -2.0, 7.5, 0.25, 1e3, 4.0, 4.0};
  RunningStats s;
  double sum = 0.0;
  for (double x : xs) {
    s.add(x);
    sum += x;
  }
  const double mean = sum / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(s.mean(), mean, 1e-12);
  EXPECT_NEAR(s.variance(), ss / (xs.size() - 1), 1e-9);
  EXPECT_EQ(s.count(), xs.size());
  EXPECT_EQ(RunningStats{}.variance(), 0.0);
}

}  // namespace
}  // namespace rcp
