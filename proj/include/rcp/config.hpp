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

// JSON run configuration: schema validation with field-path diagnostics,
// defaults matching the reference experiment protocol, and a stable hash of
// the resolved configuration.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcp/experiments.hpp"

namespace rcp {

inline constexpr std::string_view kVersion = "0.3.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProfileSpec {
  std::string family = "truncated_lognormal";
  double mu_log = 0.0;
  double sigma_log = 0.5;
  double lo = 0.0;
  double hi = 2.5;
  std::size_t bidders = 1;

  ValueDistribution value() const {
    if (family == "uniform") return ValueDistribution::uniform(lo, hi);
    return ValueDistribution::truncated_lognormal(mu_log, sigma_log, lo, hi);
  }
  MarketProfile profile() const { return MarketProfile::iid(value(), bidders); }
};

/// Single-mechanism settings used by `oracle` and `simulate`.
struct MechanismSpec {
  MechanismKind kind = MechanismKind::dp_rcp;
  double lambda = 0.5;
  double epsilon = 2.0;
  std::size_t bidder = 0;  // zero-based; 1-based in the file

  MechanismConfig config() const {
    return {kind, lambda, NoiseDistribution::laplace(epsilon)};
  }
};

struct GridSpec {
  std::vector<MechanismKind> mechanisms{MechanismKind::dp_rcp, MechanismKind::srcp};
  std::vector<double> lambdas{0.2, 0.4, 0.6, 0.8};
  std::vector<double> epsilons = default_epsilons();
  std::size_t auctions_per_stage = 5000;
  double alpha = 0.1;
  std::size_t repetitions = 10;
  std::size_t ic_samples = 5000;
  std::vector<std::size_t> dic_bidders{0};  // zero-based; 1-based in the file
};

struct RunConfig {
  ProfileSpec profile;
  MechanismSpec mechanism;
  GridSpec grid;
  std::string output = "results/sweep.csv";
  std::uint64_t master_seed = 20240521;
  Normalizer normalizer = Normalizer::welfare;

  ExperimentGrid experiment_grid() const {
    ExperimentGrid g;
    g.profile = profile.profile();
    g.mechanisms = grid.mechanisms;
    g.lambdas = grid.lambdas;
    g.epsilons = grid.epsilons;
    g.auctions_per_stage = grid.auctions_per_stage;
    g.alpha = grid.alpha;
    g.repetitions = grid.repetitions;
    g.ic_samples = grid.ic_samples;
    g.dic_bidders = grid.dic_bidders;
    g.master_seed = master_seed;
    g.normalizer = normalizer;
    return g;
  }
};

namespace detail {

using nlohmann::json;

inline json number_to_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    std::set<std::string_view> known(keys);
    for (const auto& [k, v] : node_.items()) {
      if (!known.count(k)) fail(path_ + "." + k, "unknown field");
    }
  }

  const json* find(std::string_view key) const {
    auto it = node_.find(std::string(key));
    return it == node_.end() ? nullptr : &*it;
  }

  std::string child(std::string_view key) const { return path_ + "." + std::string(key); }

  static double as_number(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return kInfinity;
    }
    fail(path, "expected a number or \"inf\"");
  }

  static std::uint64_t as_count(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    fail(path, "expected a non-negative integer");
  }

  static std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  void number(std::string_view key, double& out) const {
    if (auto* v = find(key)) out = as_number(*v, child(key));
  }
  template <class T>
  void count(std::string_view key, T& out) const {
    if (auto* v = find(key)) out = static_cast<T>(as_count(*v, child(key)));
  }
  void string(std::string_view key, std::string& out) const {
    if (auto* v = find(key)) out = as_string(*v, child(key));
  }

  template <class F>
  void list(std::string_view key, F&& each) const {
    auto* v = find(key);
    if (!v) return;
    if (!v->is_array()) fail(child(key), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      each((*v)[i], child(key) + "[" + std::to_string(i) + "]");
    }
  }

  const json& node() const { return node_; }

 private:
  const json& node_;
  std::string path_;
};

template <class F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace detail

/// Parses a configuration document. Every field is optional; unknown fields
/// and ill-typed values raise ConfigError naming the offending path.
inline RunConfig parse_config(const nlohmann::json& doc) {
  using detail::Reader;
  RunConfig cfg;
  Reader root(doc, "config");
  root.allow({"profile", "mechanism", "grid", "output", "master_seed", "normalizer"});

  if (auto* p = root.find("profile")) {
    Reader r(*p, "config.profile");
    r.allow({"family", "mu_log", "sigma_log", "lo", "hi", "bidders"});
    r.string("family", cfg.profile.family);
    if (cfg.profile.family != "uniform" && cfg.profile.family != "truncated_lognormal") {
      Reader::fail("config.profile.family", "expected \"uniform\" or \"truncated_lognormal\"");
    }
    if (cfg.profile.family == "uniform") {
      cfg.profile.lo = 0.0;
      cfg.profile.hi = 1.0;
    }
    r.number("mu_log", cfg.profile.mu_log);
    r.number("sigma_log", cfg.profile.sigma_log);
    r.number("lo", cfg.profile.lo);
    r.number("hi", cfg.profile.hi);
    r.count("bidders", cfg.profile.bidders);
    if (cfg.profile.bidders == 0) Reader::fail("config.profile.bidders", "must be >= 1");
    detail::with_path("config.profile", [&] { return cfg.profile.value(); });
  }

  if (auto* m = root.find("mechanism")) {
    Reader r(*m, "config.mechanism");
    r.allow({"kind", "lambda", "epsilon", "bidder"});
    if (auto* k = r.find("kind")) {
      const auto name = Reader::as_string(*k, "config.mechanism.kind");
      cfg.mechanism.kind =
          detail::with_path("config.mechanism.kind", [&] { return parse_mechanism_kind(name); });
    }
    r.number("lambda", cfg.mechanism.lambda);
    r.number("epsilon", cfg.mechanism.epsilon);
    if (!(cfg.mechanism.epsilon > 0.0)) Reader::fail("config.mechanism.epsilon", "must be positive");
    std::size_t bidder = cfg.mechanism.bidder + 1;
    r.count("bidder", bidder);
    if (bidder == 0 || bidder > cfg.profile.bidders) {
      Reader::fail("config.mechanism.bidder", "must be in [1, profile.bidders]");
    }
    cfg.mechanism.bidder = bidder - 1;
    detail::with_path("config.mechanism.lambda", [&] {
      check_lambda(cfg.mechanism.lambda, cfg.profile.bidders);
      return 0;
    });
  }

  if (auto* g = root.find("grid")) {
    Reader r(*g, "config.grid");
    r.allow({"mechanisms", "lambdas", "epsilons", "auctions_per_stage", "alpha",
             "repetitions", "ic_samples", "dic_bidders"});
    if (r.find("mechanisms")) cfg.grid.mechanisms.clear();
    r.list("mechanisms", [&](const auto& v, const std::string& path) {
      const auto name = Reader::as_string(v, path);
      cfg.grid.mechanisms.push_back(
          detail::with_path(path, [&] { return parse_mechanism_kind(name); }));
    });
    if (r.find("lambdas")) cfg.grid.lambdas.clear();
    r.list("lambdas", [&](const auto& v, const std::string& path) {
      const double l = Reader::as_number(v, path);
      detail::with_path(path, [&] {
        check_lambda(l, cfg.profile.bidders);
        return 0;
      });
      cfg.grid.lambdas.push_back(l);
    });
    if (r.find("epsilons")) cfg.grid.epsilons.clear();
    r.list("epsilons", [&](const auto& v, const std::string& path) {
      const double e = Reader::as_number(v, path);
      if (!(e > 0.0)) Reader::fail(path, "must be positive");
      cfg.grid.epsilons.push_back(e);
    });
    r.count("auctions_per_stage", cfg.grid.auctions_per_stage);
    r.number("alpha", cfg.grid.alpha);
    if (!(cfg.grid.alpha > 0.0 && cfg.grid.alpha < 1.0)) {
      Reader::fail("config.grid.alpha", "must lie in (0, 1)");
    }
    r.count("repetitions", cfg.grid.repetitions);
    if (r.find("ic_samples")) {
      r.count("ic_samples", cfg.grid.ic_samples);
    } else {
      cfg.grid.ic_samples = cfg.grid.auctions_per_stage;
    }
    if (r.find("dic_bidders")) cfg.grid.dic_bidders.clear();
    r.list("dic_bidders", [&](const auto& v, const std::string& path) {
      const auto b = Reader::as_count(v, path);
      if (b == 0 || b > cfg.profile.bidders) Reader::fail(path, "must be in [1, profile.bidders]");
      cfg.grid.dic_bidders.push_back(static_cast<std::size_t>(b - 1));
    });
  }

  root.string("output", cfg.output);
  root.count("master_seed", cfg.master_seed);
  if (auto* n = root.find("normalizer")) {
    const auto name = Reader::as_string(*n, "config.normalizer");
    cfg.normalizer =
        detail::with_path("config.normalizer", [&] { return parse_normalizer(name); });
  }
  detail::with_path("config.grid", [&] {
    cfg.experiment_grid().validate();
    return 0;
  });
  return cfg;
}

inline RunConfig parse_config_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Fully resolved configuration. The output path is not part of it, so
/// parse_config(to_json(c)) reproduces c up to `output`.
inline nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  json mechanisms = json::array();
  for (auto k : c.grid.mechanisms) mechanisms.push_back(std::string(to_string(k)));
  json epsilons = json::array();
  for (double e : c.grid.epsilons) epsilons.push_back(detail::number_to_json(e));
  json dic_bidders = json::array();
  for (auto b : c.grid.dic_bidders) dic_bidders.push_back(b + 1);
  json profile = {{"family", c.profile.family},
                  {"lo", c.profile.lo},
                  {"hi", c.profile.hi},
                  {"bidders", c.profile.bidders}};
  if (c.profile.family == "truncated_lognormal") {
    profile["mu_log"] = c.profile.mu_log;
    profile["sigma_log"] = c.profile.sigma_log;
  }
  return {
      {"profile", profile},
      {"mechanism",
       {{"kind", std::string(to_string(c.mechanism.kind))},
        {"lambda", c.mechanism.lambda},
        {"epsilon", detail::number_to_json(c.mechanism.epsilon)},
        {"bidder", c.mechanism.bidder + 1}}},
      {"grid",
       {{"mechanisms", mechanisms},
        {"lambdas", c.grid.lambdas},
        {"epsilons", epsilons},
        {"auctions_per_stage", c.grid.auctions_per_stage},
        {"alpha", c.grid.alpha},
        {"repetitions", c.grid.repetitions},
        {"ic_samples", c.grid.ic_samples},
        {"dic_bidders", dic_bidders}}},
      {"master_seed", c.master_seed},
      {"normalizer", std::string(to_string(c.normalizer))},
  };
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// FNV-1a of the compact, key-sorted JSON of the resolved config.
inline std::string config_hash(const RunConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json(c).dump())));
  return buf;
}

/// Header lines for output files: tool version, hash and seed, then the
/// resolved config itself.
inline std::vector<std::string> run_preamble(const RunConfig& c) {
  return {"rcp " + std::string(kVersion) + " config_hash=" + config_hash(c) +
              " master_seed=" + std::to_string(c.master_seed),
          "config " + to_json(c).dump()};
}

}  // namespace rcp
