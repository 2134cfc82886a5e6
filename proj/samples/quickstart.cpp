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

// Trains both mechanisms on one simulated stage and compares them with the
// population oracles.

#include <cstdio>

#include "rcp/rcp.hpp"

int main() {
  const auto values = rcp::ValueDistribution::truncated_lognormal(0.0, 0.5, 0.0, 2.5);
  const auto profile = rcp::MarketProfile::iid(values, 2);
  const double lambda = 1.6;
  const double epsilon = 3.2;
  const auto noise = rcp::NoiseDistribution::laplace(epsilon);

  std::printf("population clearing price  %.6f\n", rcp::oracle_clearing_price(profile, lambda));
  std::printf("population smoothed reserve %.6f\n",
              rcp::smoothed_oracle_reserve(profile, noise, lambda));

  for (auto kind : {rcp::MechanismKind::dp_rcp, rcp::MechanismKind::srcp}) {
    rcp::Rng rng(42);
    const auto run = rcp::simulate_two_stage({kind, lambda, noise}, profile, 5000, rng);
    rcp::Rng ic_rng(43);
    const auto dic = rcp::ic_metric_mc({kind, lambda, noise}, profile, 0, 0.1, 20000, ic_rng);
    std::printf("%-7s trained %.6f  revenue %.4f  DIC %.4f +- %.4f\n",
                std::string(rcp::to_string(kind)).c_str(), run.policy.base_price,
                run.mean_payment() / rcp::expected_highest_value(profile), dic.mean,
                dic.ci_half_width);
  }
  return 0;
}
