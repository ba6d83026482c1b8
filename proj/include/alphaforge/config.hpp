#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphaforge/data.hpp"
#include "alphaforge/dimensions.hpp"
#include "alphaforge/env.hpp"
#include "alphaforge/program.hpp"
#include "alphaforge/search.hpp"
#include "alphaforge/strategy.hpp"

namespace alphaforge {

struct DataConfig {
  std::string csv_path = "market.csv";
  int horizon = 20;
  std::vector<std::string> features = OpsConfig{}.features;
  std::string split_mode = "fraction";  // "fraction" or "date"
  double train_frac = 0.6;
  double valid_frac = 0.2;
  std::string train_from, train_to;
  std::string valid_from, valid_to;
  std::string test_from, test_to;
};

struct PathsConfig {
  std::string mined_set = "mined_alphas.jsonl";
  std::string search_log = "search_log.jsonl";
  std::string backtest_csv = "backtest.csv";
  std::string eval_report = "eval_report.json";
};

/// Whole-run configuration; serializes to a single JSON file with full
/// defaulting. Unknown keys are rejected so typos cannot silently fall back
/// to defaults.
struct RunConfig {
  unsigned seed = 42;
  DataConfig data;
  OpsConfig ops;
  int exponent_bound = 3;
  std::map<std::string, std::array<int, 3>> feature_dims;  // overrides/additions
  MdpConfig mdp;
  SearchConfig search;             // seed field mirrors the top-level seed
  std::string guidance = "network";  // "network" or "uniform"
  StrategyConfig strategy;
  PathsConfig paths;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static RunConfig load(const std::string& path);
  void save(const std::string& path) const;

  /// Consistency checks beyond parse-time typing. Throws ConfigError.
  void validate() const;

  /// Dimension table: defaults plus configured overrides; every configured
  /// feature must end up with an entry.
  DimRules dim_rules() const;

  /// Applies the configured split mode to a loaded dataset.
  void apply_splits(Dataset& dataset) const;
};

}  // namespace alphaforge
