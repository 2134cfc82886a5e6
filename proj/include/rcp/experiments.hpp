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

// Seeded revenue / IC-metric sweeps over (mechanism, lambda, epsilon) grids,
// their CSV form, and CI-aware Pareto comparison of the resulting curves.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rcp/distributions.hpp"
#include "rcp/mechanisms.hpp"
#include "rcp/metrics.hpp"
#include "rcp/numerics.hpp"

namespace rcp {

enum class Normalizer { welfare, second_value };

inline std::string_view to_string(Normalizer n) {
  return n == Normalizer::welfare ? "welfare" : "second_value";
}

inline Normalizer parse_normalizer(std::string_view name) {
  if (name == "welfare") return Normalizer::welfare;
  if (name == "second_value") return Normalizer::second_value;
  throw std::invalid_argument("unknown normalizer '" + std::string(name) +
                              "' (expected welfare or second_value)");
}

/// Lognormal(0, 0.5) truncated to [0, 2.5].
inline ValueDistribution default_value_distribution() {
  return ValueDistribution::truncated_lognormal(0.0, 0.5, 0.0, 2.5);
}

inline std::vector<double> default_epsilons() {
  return {0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4, 12.8, kInfinity};
}

struct ExperimentGrid {
  MarketProfile profile = MarketProfile::iid(default_value_distribution(), 1);
  std::vector<MechanismKind> mechanisms{MechanismKind::dp_rcp, MechanismKind::srcp};
  std::vector<double> lambdas{0.2, 0.4, 0.6, 0.8};
  std::vector<double> epsilons = default_epsilons();
  std::size_t auctions_per_stage = 5000;  // K
  double alpha = 0.1;
  std::size_t repetitions = 10;
  std::size_t ic_samples = 5000;
  std::vector<std::size_t> dic_bidders{0};  // zero-based
  std::uint64_t master_seed = 20240521;
  Normalizer normalizer = Normalizer::welfare;

  std::size_t cell_count() const {
    return mechanisms.size() * lambdas.size() * epsilons.size();
  }

  void validate() const {
    if (mechanisms.empty()) throw std::invalid_argument("grid: empty mechanism list");
    if (lambdas.empty()) throw std::invalid_argument("grid: empty lambda list");
    if (epsilons.empty()) throw std::invalid_argument("grid: empty epsilon list");
    if (dic_bidders.empty()) throw std::invalid_argument("grid: empty dic_bidders list");
    for (double l : lambdas) check_lambda(l, profile.size());
    for (double e : epsilons) {
      if (!(e > 0.0)) throw std::invalid_argument("grid: epsilon must be positive");
    }
    for (auto b : dic_bidders) {
      if (b >= profile.size()) throw std::invalid_argument("grid: dic bidder out of range");
    }
    if (auctions_per_stage == 0) throw std::invalid_argument("grid: K must be >= 1");
    if (repetitions < 2) throw std::invalid_argument("grid: need >= 2 repetitions");
    if (ic_samples < 2) throw std::invalid_argument("grid: need >= 2 IC samples");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("grid: alpha outside (0, 1)");
    if (normalizer == Normalizer::second_value && profile.size() < 2) {
      throw std::invalid_argument("grid: second_value normalizer needs >= 2 bidders");
    }
  }
};

struct DicEstimate {
  std::size_t bidder = 0;  // zero-based
  MetricEstimate estimate;
};

struct SweepResult {
  MechanismKind mechanism = MechanismKind::dp_rcp;
  double lambda = 0.0;
  double epsilon = kInfinity;
  std::size_t n_bidders = 1;
  MetricEstimate revenue;  // normalized
  std::vector<DicEstimate> dic;
  std::size_t repetitions = 0;
  std::uint64_t seed = 0;  // cell seed
};

inline double revenue_normalizer(const ExperimentGrid& grid) {
  const MarketProfile values = grid.profile.truthful();
  const double z = grid.normalizer == Normalizer::welfare
                       ? expected_highest_value(values)
                       : expected_second_value(values);
  if (!(z > 0.0)) throw std::domain_error("revenue normalizer is zero");
  return z;
}

struct RepetitionOutcome {
  double revenue = 0.0;     // raw mean stage-2 payment
  std::vector<double> dic;  // one per grid.dic_bidders entry
};

/// One repetition: a truthful two-stage run with K auctions per stage, then
/// the finite-alpha IC metric for each tracked bidder. The IC estimate of
/// tracked bidder j uses its own stream split_seed(seed, j + 1).
inline RepetitionOutcome run_repetition(const ExperimentGrid& grid,
                                        const MechanismConfig& config,
                                        std::uint64_t seed) {
  const MarketProfile truthful = grid.profile.truthful();
  Rng rng(seed);
  RepetitionOutcome out;
  out.revenue = simulate_two_stage(config, truthful, grid.auctions_per_stage, rng)
                    .mean_payment();
  for (std::size_t j = 0; j < grid.dic_bidders.size(); ++j) {
    Rng ic_rng(split_seed(seed, j + 1));
    out.dic.push_back(ic_metric_mc(config, truthful, grid.dic_bidders[j], grid.alpha,
                                   grid.ic_samples, ic_rng)
                          .mean);
  }
  return out;
}

inline std::size_t cell_index(const ExperimentGrid& grid, std::size_t mechanism_idx,
                              std::size_t lambda_idx, std::size_t epsilon_idx) {
  return (mechanism_idx * grid.lambdas.size() + lambda_idx) * grid.epsilons.size() +
         epsilon_idx;
}

/// Aggregates `grid.repetitions` repetitions of one cell; CIs are over the
/// repetition means. Repetition r uses split_seed(cell seed, r).
inline SweepResult run_cell(const ExperimentGrid& grid, std::size_t mechanism_idx,
                            std::size_t lambda_idx, std::size_t epsilon_idx,
                            double normalizer) {
  SweepResult res;
  res.mechanism = grid.mechanisms.at(mechanism_idx);
  res.lambda = grid.lambdas.at(lambda_idx);
  res.epsilon = grid.epsilons.at(epsilon_idx);
  res.n_bidders = grid.profile.size();
  res.repetitions = grid.repetitions;
  res.seed = split_seed(grid.master_seed,
                        cell_index(grid, mechanism_idx, lambda_idx, epsilon_idx));
  const MechanismConfig config{res.mechanism, res.lambda,
                               NoiseDistribution::laplace(res.epsilon)};
  RunningStats revenue;
  std::vector<RunningStats> dic(grid.dic_bidders.size());
  for (std::size_t r = 0; r < grid.repetitions; ++r) {
    const auto rep = run_repetition(grid, config, split_seed(res.seed, r));
    revenue.add(rep.revenue / normalizer);
    for (std::size_t j = 0; j < dic.size(); ++j) dic[j].add(rep.dic[j]);
  }
  res.revenue = MetricEstimate::from(revenue, res.seed);
  for (std::size_t j = 0; j < dic.size(); ++j) {
    res.dic.push_back({grid.dic_bidders[j], MetricEstimate::from(dic[j], res.seed)});
  }
  return res;
}

/// Runs every cell on up to `jobs` threads. Each cell depends only on the
/// grid and its index, so the output does not depend on `jobs`. Results are
/// sorted by (mechanism, lambda, epsilon).
inline std::vector<SweepResult> run_sweep(const ExperimentGrid& grid, std::size_t jobs = 1) {
  grid.validate();
  const double normalizer = revenue_normalizer(grid);
  const std::size_t total = grid.cell_count();
  const std::size_t per_mech = grid.lambdas.size() * grid.epsilons.size();
  std::vector<SweepResult> results(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t c = next++; c < total; c = next++) {
      try {
        results[c] = run_cell(grid, c / per_mech, (c % per_mech) / grid.epsilons.size(),
                              c % grid.epsilons.size(), normalizer);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, total);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    if (a.mechanism != b.mechanism) return to_string(a.mechanism) < to_string(b.mechanism);
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.epsilon < b.epsilon;
  });
  return results;
}

inline constexpr std::string_view kSweepCsvHeader =
    "mechanism,lambda,epsilon,n_bidders,rev_mean,rev_ci,dic_bidder,dic_mean,dic_ci,"
    "repetitions,seed";

/// One row per (cell, tracked bidder); bidders are printed 1-based. Each
/// preamble line is written first, prefixed by "# ".
inline void write_sweep_csv(std::ostream& os, const std::vector<SweepResult>& results,
                            const std::vector<std::string>& preamble = {}) {
  for (const auto& line : preamble) os << "# " << line << '\n';
  os << kSweepCsvHeader << '\n';
  for (const auto& r : results) {
    for (const auto& d : r.dic) {
      os << to_string(r.mechanism) << ',' << format_number(r.lambda, 9) << ','
         << format_number(r.epsilon, 9) << ',' << r.n_bidders << ','
         << format_number(r.revenue.mean, 9) << ','
         << format_number(r.revenue.ci_half_width, 9) << ',' << d.bidder + 1 << ','
         << format_number(d.estimate.mean, 9) << ','
         << format_number(d.estimate.ci_half_width, 9) << ',' << r.repetitions << ','
         << r.seed << '\n';
    }
  }
}

/// Writes the CSV to `path`, creating missing parent directories.
inline void write_sweep_csv_file(const std::filesystem::path& path,
                                 const std::vector<SweepResult>& results,
                                 const std::vector<std::string>& preamble = {}) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create directory " +
                               path.parent_path().string() + ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_sweep_csv(out, results, preamble);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Pareto comparison

struct TradeoffPoint {
  double epsilon = kInfinity;
  double revenue = 0.0;
  double revenue_ci = 0.0;
  double dic = 0.0;
  double dic_ci = 0.0;
};

/// `a` dominates `b` when it is better by more than the combined CI
/// half-width in one coordinate and no worse in the other.
inline bool dominates(const TradeoffPoint& a, const TradeoffPoint& b) {
  const double rev_gap = a.revenue - b.revenue;
  const double dic_gap = a.dic - b.dic;
  const bool rev_better = rev_gap > a.revenue_ci + b.revenue_ci;
  const bool dic_better = dic_gap > a.dic_ci + b.dic_ci;
  return (rev_better && dic_gap >= 0.0) || (dic_better && rev_gap >= 0.0);
}

struct TradeoffCurve {
  double lambda = 0.0;
  std::vector<TradeoffPoint> points;
  std::vector<double> dominated_by;  // lambdas of curves that dominate this one
  bool undominated() const { return dominated_by.empty(); }
};

/// A curve is dominated by another when each of its points is dominated by
/// some point of the other curve.
inline bool curve_dominates(const TradeoffCurve& a, const TradeoffCurve& b) {
  if (b.points.empty()) return false;
  return std::all_of(b.points.begin(), b.points.end(), [&](const TradeoffPoint& q) {
    return std::any_of(a.points.begin(), a.points.end(),
                       [&](const TradeoffPoint& p) { return dominates(p, q); });
  });
}

struct ParetoReport {
  MechanismKind mechanism = MechanismKind::dp_rcp;
  std::size_t n_bidders = 0;
  std::size_t dic_bidder = 0;
  std::vector<TradeoffCurve> curves;  // ascending lambda

  const TradeoffCurve& curve(double lambda) const {
    for (const auto& c : curves) {
      if (c.lambda == lambda) return c;
    }
    throw std::out_of_range("no curve for lambda " + format_number(lambda, 9));
  }

  std::vector<double> undominated_lambdas() const {
    std::vector<double> out;
    for (const auto& c : curves) {
      if (c.undominated()) out.push_back(c.lambda);
    }
    return out;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "pareto " << to_string(mechanism) << " n=" << n_bidders
       << " dic_bidder=" << dic_bidder + 1 << '\n';
    for (const auto& c : curves) {
      os << "  lambda=" << format_number(c.lambda, 6) << ' ';
      if (c.undominated()) {
        os << "undominated";
      } else {
        os << "dominated by";
        for (double l : c.dominated_by) os << ' ' << format_number(l, 6);
      }
      os << '\n';
    }
    return os.str();
  }
};

/// Builds one (revenue, DIC) curve per lambda from the rows of `mechanism`
/// and compares every pair of curves.
inline ParetoReport pareto_summary(const std::vector<SweepResult>& results,
                                   MechanismKind mechanism, std::size_t dic_bidder = 0) {
  ParetoReport report;
  report.mechanism = mechanism;
  report.dic_bidder = dic_bidder;
  for (const auto& r : results) {
    if (r.mechanism != mechanism) continue;
    report.n_bidders = r.n_bidders;
    auto it = std::find_if(r.dic.begin(), r.dic.end(),
                           [&](const DicEstimate& d) { return d.bidder == dic_bidder; });
    if (it == r.dic.end()) continue;
    auto curve = std::find_if(report.curves.begin(), report.curves.end(),
                              [&](const TradeoffCurve& c) { return c.lambda == r.lambda; });
    if (curve == report.curves.end()) {
      report.curves.push_back({r.lambda, {}, {}});
      curve = std::prev(report.curves.end());
    }
    curve->points.push_back({r.epsilon, r.revenue.mean, r.revenue.ci_half_width,
                             it->estimate.mean, it->estimate.ci_half_width});
  }
  std::sort(report.curves.begin(), report.curves.end(),
            [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  for (auto& target : report.curves) {
    for (const auto& other : report.curves) {
      if (&other != &target && curve_dominates(other, target)) {
        target.dominated_by.push_back(other.lambda);
      }
    }
  }
  return report;
}

}  // namespace rcp
