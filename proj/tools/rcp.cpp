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

// rcp: clearing-price reserves for repeated second-price auctions.
//
//   rcp price bids.csv --lambda 0.5
//   rcp oracle --config configs/uniform_oracle.json
//   rcp simulate --config configs/uniform_oracle.json --seed 7
//   rcp sweep --config configs/two_bidders.json --jobs 4 --out out.csv
//   rcp validate

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rcp/rcp.hpp"

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t jobs = 1;
  std::string normalizer;
};

rcp::RunConfig resolve_config(const GlobalOptions& g) {
  rcp::RunConfig cfg =
      g.config_path.empty() ? rcp::RunConfig{} : rcp::load_config(g.config_path);
  if (g.seed) cfg.master_seed = *g.seed;
  if (!g.out.empty()) cfg.output = g.out;
  if (!g.normalizer.empty()) cfg.normalizer = rcp::parse_normalizer(g.normalizer);
  return cfg;
}

std::string fmt(double x) { return rcp::format_number(x, 12); }

int cmd_price(const std::string& csv, double lambda) {
  const rcp::BidBatch batch = rcp::read_batch_csv(std::filesystem::path(csv));
  if (lambda > static_cast<double>(batch.bidders())) {
    std::cerr << "rcp: error: lambda exceeds bidders per profile (lambda=" << lambda
              << ", bidders=" << batch.bidders() << ")\n";
    return 2;
  }
  std::cout << fmt(rcp::empirical_clearing_price(batch, lambda)) << '\n';
  return 0;
}

int cmd_oracle(const rcp::RunConfig& cfg) {
  const auto profile = cfg.profile.profile();
  const auto& m = cfg.mechanism;
  const auto noise = rcp::NoiseDistribution::laplace(m.epsilon);
  const double n = static_cast<double>(profile.size());
  const double p = rcp::oracle_clearing_price(profile, m.lambda);
  const auto zeta = rcp::local_sensitivity_zeta(profile, m.lambda, noise, m.bidder);

  std::cout << "# " << rcp::run_preamble(cfg).front() << '\n'
            << "clearing_price " << fmt(p) << '\n'
            << "value_quantile_1_minus_lambda_over_n "
            << fmt(profile.bidder(0).value.quantile(1.0 - m.lambda / n)) << '\n'
            << "smoothed_reserve " << fmt(zeta.reserve) << '\n'
            << "kappa " << fmt(zeta.kappa) << '\n'
            << "n_minus_lambda " << fmt(n - m.lambda) << '\n'
            << "eta " << fmt(rcp::local_sensitivity_eta(profile, m.lambda, m.bidder)) << '\n'
            << "zeta " << fmt(zeta.zeta) << '\n'
            << "dic_dp_closed " << fmt(rcp::ic_metric_dp_closed(profile, m.lambda, noise, m.bidder))
            << '\n'
            << "dic_srcp_closed "
            << fmt(rcp::ic_metric_srcp_closed(profile, m.lambda, noise, m.bidder)) << '\n'
            << "revenue_clearing " << fmt(rcp::expected_revenue_closed(profile, p)) << '\n'
            << "revenue_dp_expected "
            << fmt(rcp::dp_rcp_expected_revenue(profile, m.lambda, noise)) << '\n'
            << "revenue_smoothed " << fmt(rcp::expected_revenue_closed(profile, zeta.reserve))
            << '\n'
            << "welfare " << fmt(rcp::expected_highest_value(profile)) << '\n';
  return 0;
}

int cmd_simulate(const rcp::RunConfig& cfg, bool write_file) {
  const auto profile = cfg.profile.profile();
  rcp::Rng rng(cfg.master_seed);
  const auto run = rcp::simulate_two_stage(cfg.mechanism.config(), profile,
                                           cfg.grid.auctions_per_stage, rng);
  std::size_t sold = 0;
  double reserve_sum = 0.0;
  for (std::size_t k = 0; k < run.stage2_outcomes.size(); ++k) {
    sold += run.stage2_outcomes[k].sold();
    reserve_sum += run.stage2_reserves[k];
  }
  const double k = static_cast<double>(run.stage2_outcomes.size());
  std::ostringstream os;
  for (const auto& line : rcp::run_preamble(cfg)) os << "# " << line << '\n';
  os << "policy " << run.policy.to_record() << '\n'
     << "auctions " << run.stage2_outcomes.size() << '\n'
     << "revenue_mean " << fmt(run.mean_payment()) << '\n'
     << "revenue_normalized "
     << fmt(run.mean_payment() / rcp::expected_highest_value(profile)) << '\n'
     << "sell_rate " << fmt(static_cast<double>(sold) / k) << '\n'
     << "reserve_mean " << fmt(reserve_sum / k) << '\n';
  std::cout << os.str();
  if (write_file) {
    std::ofstream f(cfg.output);
    if (!(f << os.str())) throw std::runtime_error("cannot write " + cfg.output);
  }
  return 0;
}

int cmd_sweep(const rcp::RunConfig& cfg, std::size_t jobs) {
  const auto grid = cfg.experiment_grid();
  const auto results = rcp::run_sweep(grid, jobs);
  rcp::write_sweep_csv_file(cfg.output, results, rcp::run_preamble(cfg));
  std::size_t rows = 0;
  for (const auto& r : results) rows += r.dic.size();
  std::cout << "wrote " << rows << " rows to " << cfg.output << '\n';
  for (auto kind : grid.mechanisms) {
    for (auto b : grid.dic_bidders) {
      std::cout << rcp::pareto_summary(results, kind, b).to_text();
    }
  }
  return 0;
}

int cmd_validate(const rcp::RunConfig& cfg, const std::string& eta_form) {
  rcp::ValidationOptions opt;
  opt.seed = cfg.master_seed;
  if (eta_form == "competitors_only") {
    opt.eta_form = rcp::EtaForm::competitors_only;
  } else if (eta_form != "all_bidders") {
    throw std::invalid_argument("unknown eta form '" + eta_form + "'");
  }
  const auto checks = rcp::run_validation_suite(opt);
  std::size_t passed = 0;
  for (const auto& c : checks) {
    passed += c.passed;
    std::printf("%-4s %-70s %s %s %s  [%s]\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                fmt(c.measured).c_str(), c.relation.c_str(), fmt(c.bound).c_str(),
                c.note.c_str());
  }
  std::printf("%zu/%zu checks passed\n", passed, checks.size());
  return passed == checks.size() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clearing-price reserve mechanisms for repeated second-price auctions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(rcp::kVersion));

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--seed", g.seed, "Master seed (overrides the config)");
  app.add_option("--out", g.out, "Output path (overrides the config)");
  app.add_option("--jobs", g.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--normalizer", g.normalizer, "Revenue normalizer")
      ->check(CLI::IsMember({"welfare", "second_value"}));

  std::string csv;
  double lambda = 0.0;
  auto* price = app.add_subcommand("price", "Empirical clearing price of a bid batch");
  price->add_option("batch", csv, "CSV of bid profiles")->required();
  price->add_option("--lambda", lambda, "Clearing-loss weight")->required();

  auto* oracle = app.add_subcommand("oracle", "Population reserves, sensitivities, closed forms");
  auto* simulate = app.add_subcommand("simulate", "One two-stage run of the configured mechanism");
  auto* sweep = app.add_subcommand("sweep", "Revenue / IC-metric sweep over the configured grid");
  std::string eta_form = "all_bidders";
  auto* validate = app.add_subcommand("validate", "Numerical self-check suite");
  validate->add_option("--eta-form", eta_form, "Sensitivity formula to check")
      ->check(CLI::IsMember({"all_bidders", "competitors_only"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*price) return cmd_price(csv, lambda);
    const auto cfg = resolve_config(g);
    if (*oracle) return cmd_oracle(cfg);
    if (*simulate) return cmd_simulate(cfg, !g.out.empty());
    if (*sweep) return cmd_sweep(cfg, g.jobs);
    if (*validate) return cmd_validate(cfg, eta_form);
  } catch (const std::exception& e) {
    std::cerr << "rcp: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
