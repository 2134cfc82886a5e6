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

// Self-check suite behind `rcp validate`: closed-form oracle anchors,
// finite-difference checks of the sensitivities, and the two revenue
// guarantees evaluated numerically.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rcp/clearing.hpp"
#include "rcp/distributions.hpp"
#include "rcp/experiments.hpp"
#include "rcp/metrics.hpp"

namespace rcp {

struct ValidationCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  std::string relation;  // how measured must compare to bound
  bool passed = false;
  std::string note;
};

struct ValidationOptions {
  EtaForm eta_form = EtaForm::all_bidders;
  std::uint64_t seed = 20240521;
  std::size_t bound_trials = 100000;
  std::size_t grid = 10000;  // Lipschitz estimation grid
};

/// Truncated Lognormal(0, 0.5) on [0, 2.5] rescaled to [0, 1].
inline ValueDistribution unit_lognormal() {
  return ValueDistribution::truncated_lognormal(0.0, 0.5, 0.0, 2.5).scaled(1.0 / 2.5);
}

namespace detail {

inline ValidationCheck within(std::string name, double measured, double target,
                              double tol) {
  ValidationCheck c{std::move(name), measured, tol, "|x - target| <=", false,
                    "target " + format_number(target, 12)};
  c.passed = std::abs(measured - target) <= tol;
  return c;
}

inline ValidationCheck guarded(const std::string& name,
                               const std::function<ValidationCheck()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, std::nan(""), std::nan(""), "", false, std::string("error: ") + e.what()};
  }
}

}  // namespace detail

inline std::vector<ValidationCheck> run_validation_suite(const ValidationOptions& opt = {}) {
  std::vector<ValidationCheck> out;
  const auto unit = ValueDistribution::uniform(0.0, 1.0);
  const auto u1 = MarketProfile::iid(unit, 1);
  const auto u2 = MarketProfile::iid(unit, 2);
  const auto ln2 = MarketProfile::iid(unit_lognormal(), 2);

  out.push_back(detail::guarded("oracle: uniform n=1 lambda=0.3", [&] {
    return detail::within("oracle: uniform n=1 lambda=0.3",
                          oracle_clearing_price(u1, 0.3), 0.7, 1e-8);
  }));
  out.push_back(detail::guarded("oracle: uniform n=2 lambda=0.5", [&] {
    return detail::within("oracle: uniform n=2 lambda=0.5",
                          oracle_clearing_price(u2, 0.5), 0.75, 1e-8);
  }));
  out.push_back(detail::guarded("oracle: smoothed reserve, symmetric case", [&] {
    return detail::within("oracle: smoothed reserve, symmetric case",
                          smoothed_oracle_reserve(u1, NoiseDistribution::laplace(2.0), 0.5),
                          0.5, 1e-6);
  }));

  struct EtaCase {
    std::string label;
    MarketProfile profile;
    double lambda;
  };
  const std::vector<EtaCase> eta_cases{{"uniform n=1 lambda=0.5", u1, 0.5},
                                       {"uniform n=2 lambda=1", u2, 1.0},
                                       {"lognormal n=2 lambda=1.2", ln2, 1.2}};
  for (const auto& c : eta_cases) {
    const std::string name = "eta vs finite difference: " + c.label;
    out.push_back(detail::guarded(name, [&] {
      const double fd = eta_finite_difference(c.profile, c.lambda, 0);
      const double eta = local_sensitivity_eta(c.profile, c.lambda, 0, opt.eta_form);
      ValidationCheck v{name, std::abs(eta - fd) / std::abs(fd), 1e-3, "relative error <=",
                        false, "eta " + format_number(eta, 9) + ", fd " + format_number(fd, 9)};
      v.passed = v.measured <= v.bound;
      return v;
    }));
  }

  const auto lap5 = NoiseDistribution::laplace(5.0);
  for (const auto& [label, profile, lambda] :
       std::vector<EtaCase>{{"uniform n=1 eps=5 lambda=0.3", u1, 0.3},
                            {"uniform n=2 eps=5 lambda=0.6", u2, 0.6}}) {
    const std::string name = "zeta vs finite difference: " + label;
    out.push_back(detail::guarded(name, [&] {
      const double fd = zeta_finite_difference(profile, lambda, lap5, 0);
      const double zeta = local_sensitivity_zeta(profile, lambda, lap5, 0).zeta;
      return detail::within(name, zeta, fd, 1e-3);
    }));
  }

  const double lip_u1 = estimate_order_lipschitz(u1, opt.grid);
  std::uint64_t stream = 0;
  for (double eps : {2.0, 10.0, kInfinity}) {
    for (double delta : {0.05, 0.2}) {
      const std::string name = "revenue bound, noisy clearing price: uniform n=1 eps=" +
                               format_number(eps, 6) + " delta=" + format_number(delta, 6);
      Rng rng(split_seed(opt.seed, ++stream));
      out.push_back(detail::guarded(name, [&] {
        const auto r = validate_dp_revenue_bound(u1, 0.5, NoiseDistribution::laplace(eps),
                                                 delta, lip_u1, opt.bound_trials, rng);
        ValidationCheck v{name, r.violation_rate, r.allowed_rate, "violation rate <=",
                          r.passed(),
                          "gap " + format_number(r.clearing_revenue - r.revenue_floor, 9)};
        if (std::isinf(eps)) v.passed = v.passed && r.clearing_revenue == r.revenue_floor;
        return v;
      }));
    }
  }

  for (const auto& [label, profile] :
       std::vector<std::pair<std::string, MarketProfile>>{{"uniform n=1", u1},
                                                          {"uniform n=2", u2}}) {
    const std::string name = "revenue bound, smoothed reserve: " + label;
    out.push_back(detail::guarded(name, [&] {
      const double n = static_cast<double>(profile.size());
      const double lip = estimate_order_lipschitz(profile, opt.grid);
      const double mu = estimate_gamma_lipschitz(profile, opt.grid);
      double worst = kInfinity;
      int zero_regime = 0;
      int cells = 0;
      for (double frac : {0.2, 0.4, 0.6, 0.8}) {
        for (double eps : default_epsilons()) {
          const auto c = check_srcp_revenue_bound(profile, frac * n, eps, lip, mu);
          worst = std::min(worst, c.smoothed_revenue - (c.clearing_revenue - c.allowance));
          zero_regime += c.smoothed_reserve == 0.0;
          ++cells;
        }
      }
      ValidationCheck v{name, worst, -1e-12, "min margin >=", worst >= -1e-12,
                        std::to_string(cells) + " cells, " + std::to_string(zero_regime) +
                            " with zero reserve"};
      return v;
    }));
  }
  return out;
}

}  // namespace rcp
