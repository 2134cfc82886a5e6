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

// Reserve mechanisms trained on stage-1 bids and the stage-2 second-price
// auction they feed.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rcp/clearing.hpp"
#include "rcp/distributions.hpp"
#include "rcp/numerics.hpp"

namespace rcp {

enum class MechanismKind { dp_rcp, srcp, no_noise };

inline std::string_view to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::dp_rcp: return "dp_rcp";
    case MechanismKind::srcp: return "srcp";
    case MechanismKind::no_noise: return "no_noise";
  }
  return "unknown";
}

inline MechanismKind parse_mechanism_kind(std::string_view name) {
  if (name == "dp_rcp") return MechanismKind::dp_rcp;
  if (name == "srcp") return MechanismKind::srcp;
  if (name == "no_noise") return MechanismKind::no_noise;
  throw std::invalid_argument("unknown mechanism '" + std::string(name) +
                              "' (expected dp_rcp, srcp or no_noise)");
}

/// Prints a price or epsilon with `digits` significant digits; infinity is
/// written as `inf`.
inline std::string format_number(double x, int digits) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline double parse_number(std::string_view text) {
  if (text == "inf" || text == "+inf" || text == "infinity") return kInfinity;
  std::string s(text);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return x;
}

struct MechanismConfig {
  MechanismKind kind = MechanismKind::dp_rcp;
  double lambda = 0.0;
  NoiseDistribution noise = NoiseDistribution::none();
};

/// Result of training. For dp_rcp the reserve is redrawn per auction as
/// max(base_price + z, 0); otherwise it is base_price itself.
struct TrainedPolicy {
  MechanismKind kind = MechanismKind::no_noise;
  double lambda = 0.0;
  double epsilon = kInfinity;  // noise level used in training or drawing
  double base_price = 0.0;
  NoiseDistribution noise = NoiseDistribution::none();

  bool deterministic() const { return kind != MechanismKind::dp_rcp || noise.is_degenerate(); }

  double draw_reserve(Rng& rng) const {
    if (kind != MechanismKind::dp_rcp) return base_price;
    return std::max(base_price + noise.sample(rng), 0.0);
  }

  /// `kind,lambda,epsilon,base_price`.
  std::string to_record() const {
    return std::string(to_string(kind)) + "," + format_number(lambda, 12) +
           "," + format_number(epsilon, 12) + "," +
           format_number(base_price, 12);
  }

  static TrainedPolicy from_record(std::string_view record) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : record) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else if (c != '\n' && c != '\r') {
        cur += c;
      }
    }
    fields.push_back(cur);
    if (fields.size() != 4) {
      throw std::invalid_argument("policy record needs 4 fields");
    }
    TrainedPolicy p;
    p.kind = parse_mechanism_kind(fields[0]);
    p.lambda = parse_number(fields[1]);
    p.epsilon = parse_number(fields[2]);
    p.base_price = parse_number(fields[3]);
    if (p.kind == MechanismKind::dp_rcp) p.noise = NoiseDistribution::laplace(p.epsilon);
    return p;
  }
};

/// Fits the reserve policy to a stage-1 batch. srcp adds one i.i.d. noise
/// vector per stored profile before solving; the others solve on raw bids.
inline TrainedPolicy train(const MechanismConfig& config, const BidBatch& batch,
                           Rng& rng) {
  if (batch.empty()) throw std::invalid_argument("train: empty bid batch");
  TrainedPolicy policy;
  policy.kind = config.kind;
  policy.lambda = config.lambda;
  policy.epsilon =
      config.kind == MechanismKind::no_noise ? kInfinity : config.noise.epsilon();
  switch (config.kind) {
    case MechanismKind::no_noise:
      policy.base_price = empirical_clearing_price(batch, config.lambda);
      break;
    case MechanismKind::dp_rcp:
      policy.base_price = empirical_clearing_price(batch, config.lambda);
      policy.noise = config.noise;
      break;
    case MechanismKind::srcp: {
      BidBatch smoothed = batch;
      for (double& b : smoothed.pooled_mutable()) b += config.noise.sample(rng);
      policy.base_price = empirical_clearing_price(smoothed, config.lambda);
      break;
    }
  }
  return policy;
}

struct AuctionOutcome {
  std::optional<std::size_t> winner;
  double payment = 0.0;

  bool sold() const { return winner.has_value(); }
};

/// Second-price auction with anonymous reserve. Ties for the top bid go to
/// the lowest index; a lone bidder faces a second-highest bid of 0.
inline AuctionOutcome run_auction(std::span<const double> bids, double reserve) {
  if (bids.empty()) throw std::invalid_argument("run_auction: no bids");
  if (!(reserve >= 0.0)) throw std::invalid_argument("run_auction: negative reserve");
  std::size_t top = 0;
  for (std::size_t i = 1; i < bids.size(); ++i) {
    if (bids[i] > bids[top]) top = i;
  }
  if (bids[top] < reserve) return {};
  double second = 0.0;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (i != top) second = std::max(second, bids[i]);
  }
  return {top, std::max(second, reserve)};
}

struct TwoStageRun {
  TrainedPolicy policy;
  BidBatch stage1;
  std::vector<double> stage2_reserves;
  std::vector<AuctionOutcome> stage2_outcomes;

  double mean_payment() const {
    double total = 0.0;
    for (const auto& o : stage2_outcomes) total += o.payment;
    return stage2_outcomes.empty() ? 0.0 : total / stage2_outcomes.size();
  }
};

/// Stage 1: K auctions at reserve 0 with bids beta_i(v_i) taken from the
/// profile's strategies. Train on those bids. Stage 2: K fresh auctions with
/// truthful bids at reserves drawn from the policy.
///
/// Draw order on `rng`: stage-1 values (profile-major within an auction),
/// training noise, then per stage-2 auction its values followed by its
/// reserve noise.
inline TwoStageRun simulate_two_stage(const MechanismConfig& config,
                                      const MarketProfile& profile,
                                      std::size_t auctions_per_stage, Rng& rng) {
  if (auctions_per_stage == 0) {
    throw std::invalid_argument("simulate_two_stage: K must be >= 1");
  }
  const std::size_t n = profile.size();
  BidBatch stage1(n);
  stage1.reserve(auctions_per_stage);
  std::vector<double> bids(n);
  for (std::size_t k = 0; k < auctions_per_stage; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& b = profile.bidder(i);
      bids[i] = b.strategy.bid(b.value.sample(rng));
    }
    stage1.add(bids);
  }
  TwoStageRun run{train(config, stage1, rng), std::move(stage1), {}, {}};
  run.stage2_reserves.reserve(auctions_per_stage);
  run.stage2_outcomes.reserve(auctions_per_stage);
  for (std::size_t k = 0; k < auctions_per_stage; ++k) {
    for (std::size_t i = 0; i < n; ++i) bids[i] = profile.bidder(i).value.sample(rng);
    const double reserve = run.policy.draw_reserve(rng);
    run.stage2_reserves.push_back(reserve);
    run.stage2_outcomes.push_back(run_auction(bids, reserve));
  }
  return run;
}

}  // namespace rcp
