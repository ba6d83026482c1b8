// alphaforge: mine formulaic alphas with guided tree search, combine them,
// and backtest a top-k/drop-n portfolio.
//
// Subcommands: synth | mine | eval | backtest
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "alphaforge/config.hpp"
#include "alphaforge/errors.hpp"
#include "alphaforge/reports.hpp"
#include "alphaforge/search.hpp"

namespace af = alphaforge;

namespace {

struct CommonOpts {
  std::string config_path;
  bool print_config = false;
};

af::RunConfig load_config(const CommonOpts& opts) {
  af::RunConfig cfg =
      opts.config_path.empty() ? af::RunConfig{} : af::RunConfig::load(opts.config_path);
  cfg.search.seed = cfg.seed;
  cfg.validate();
  if (opts.print_config) std::cout << cfg.to_json().dump(2) << '\n';
  return cfg;
}

af::Dataset load_data(const af::RunConfig& cfg, const std::string& override_path) {
  const std::string path = override_path.empty() ? cfg.data.csv_path : override_path;
  af::Dataset ds = af::load_csv(path, cfg.data.features, cfg.data.horizon);
  cfg.apply_splits(ds);
  return ds;
}

std::unique_ptr<af::GuidanceModel> make_guidance(const af::RunConfig& cfg,
                                                 const af::ActionVocabulary& vocab,
                                                 int encoding_size) {
  if (cfg.guidance == "uniform") {
    return std::make_unique<af::UniformGuidance>(vocab.size());
  }
  return std::make_unique<af::PolicyValueNet>(encoding_size, cfg.search.hidden_width,
                                              vocab.size(), cfg.seed);
}

int cmd_synth(const CommonOpts& common, const std::string& out_path, int days,
              int stocks, unsigned seed, const std::string& plant, double strength,
              int horizon) {
  af::RunConfig cfg = load_config(common);
  af::SynthParams params;
  params.seed = seed;
  params.days = days;
  params.stocks = stocks;
  params.signal_strength = strength;
  params.horizon = horizon > 0 ? horizon : cfg.data.horizon;
  params.train_frac = cfg.data.train_frac;
  params.valid_frac = cfg.data.valid_frac;
  if (!plant.empty()) {
    params.planted_alpha = af::parse_expression(plant, cfg.data.features);
  }
  af::Dataset ds = af::synth_market(params);
  af::save_csv(ds, out_path);
  std::cout << "wrote " << out_path << ": " << ds.day_count() << " days x "
            << ds.stock_count() << " stocks\n";
  if (params.planted_alpha) {
    const Eigen::MatrixXd values =
        af::evaluate(params.planted_alpha, af::EvalContext::full(ds));
    std::printf("planted alpha IC: %.4f (requested %.4f)\n",
                af::ic(values, ds.target), strength);
  }
  return 0;
}

int cmd_mine(const CommonOpts& common, const std::string& data_path) {
  af::RunConfig cfg = load_config(common);
  af::Dataset ds = load_data(cfg, data_path);
  af::DimRules rules = cfg.dim_rules();
  af::ActionVocabulary vocab(cfg.ops);
  const int encoding_size =
      cfg.ops.max_length *
      (af::kOpCount + 3 * (1 + static_cast<int>(cfg.ops.constant_pool.size()) +
                           static_cast<int>(cfg.ops.features.size()) +
                           cfg.ops.register_count));
  auto guidance = make_guidance(cfg, vocab, encoding_size);

  std::ofstream log(cfg.paths.search_log);
  af::MiningOutcome outcome =
      af::mine(ds, cfg.ops, rules, cfg.mdp, cfg.search, *guidance, &log);

  af::EvalCache cache;
  af::write_mined_set(cfg.paths.mined_set, outcome.mined, ds, &cache);
  std::cout << "episodes: " << outcome.episodes_run
            << ", mined: " << outcome.mined.size()
            << ", best train IC: " << outcome.best_train_ic << '\n'
            << "wrote " << cfg.paths.mined_set << " and " << cfg.paths.search_log
            << '\n';
  if (outcome.mined.empty()) {
    std::cerr << "warning: mined set is empty (ic_threshold "
              << cfg.search.ic_threshold << " was never reached)\n";
  }
  return 0;
}

af::SplitRange pick_split(const af::Dataset& ds, const std::string& name) {
  if (name == "train") return ds.splits.train;
  if (name == "valid") return ds.splits.valid;
  if (name == "test") return ds.splits.test;
  throw af::ConfigError("unknown split '" + name + "'");
}

int cmd_eval(const CommonOpts& common, const std::string& mined_path,
             const std::string& data_path, const std::string& split) {
  af::RunConfig cfg = load_config(common);
  af::Dataset ds = load_data(cfg, data_path);
  af::DimRules rules = cfg.dim_rules();
  af::EvalCache cache;
  af::MinedAlphaSet mined = af::read_mined_set(
      mined_path.empty() ? cfg.paths.mined_set : mined_path, cfg.ops, rules, ds, &cache);
  if (mined.empty()) throw af::EmptyData("mined set is empty");

  nlohmann::json report = af::eval_report(mined, ds, pick_split(ds, split), &cache);
  {
    std::ofstream out(cfg.paths.eval_report);
    out << report.dump(2) << '\n';
  }
  const auto& s = report.at("summary");
  std::printf("alphas: %d on split '%s'\n", s.at("count").get<int>(), split.c_str());
  for (const auto& row : report.at("alphas")) {
    std::printf("  #%d ic=%s rank_ic=%s  %s\n", row.at("rank").get<int>(),
                row.at("ic").is_null() ? "nan" : std::to_string(row.at("ic").get<double>()).c_str(),
                row.at("rank_ic").is_null()
                    ? "nan"
                    : std::to_string(row.at("rank_ic").get<double>()).c_str(),
                row.at("expression").get<std::string>().c_str());
  }
  std::printf("ic: %.4f +/- %.4f, pairwise corr: %.4f +/- %.4f\n",
              s.at("ic_mean").get<double>(), s.at("ic_std").get<double>(),
              s.at("corr_mean").get<double>(), s.at("corr_std").get<double>());
  std::cout << "wrote " << cfg.paths.eval_report << '\n';
  return 0;
}

int cmd_backtest(const CommonOpts& common, const std::string& mined_path,
                 const std::string& data_path) {
  af::RunConfig cfg = load_config(common);
  af::Dataset ds = load_data(cfg, data_path);
  af::DimRules rules = cfg.dim_rules();
  af::EvalCache cache;
  af::MinedAlphaSet mined = af::read_mined_set(
      mined_path.empty() ? cfg.paths.mined_set : mined_path, cfg.ops, rules, ds, &cache);
  if (mined.empty()) throw af::EmptyData("mined set is empty");

  af::CombinedSignal combined = af::combine_fit(mined, ds, cfg.strategy, &cache);
  const af::SplitRange test = ds.splits.test;
  Eigen::MatrixXd signal = combined.predict(ds, test, &cache);
  af::BacktestOutput output = af::run_backtest(signal, ds, test, cfg.strategy);
  af::write_backtest_csv(cfg.paths.backtest_csv, output);

  std::printf(
      "backtest over %zu days: cumulative %.4f, sharpe %.3f, mdd %.4f, mean "
      "turnover %.4f\n",
      output.daily_returns.size(), output.stats.cumulative, output.stats.sharpe,
      output.stats.mdd, output.stats.turnover_mean);
  std::cout << "wrote " << cfg.paths.backtest_csv << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"formulaic alpha mining, combination, and backtesting"};
  app.require_subcommand(1);
  CommonOpts common;
  app.add_option("--config", common.config_path, "JSON run-config file");
  app.add_flag("--print-config", common.print_config, "dump effective config");

  auto* synth = app.add_subcommand("synth", "generate a synthetic market CSV");
  std::string out_path = "market.csv";
  int days = 250, stocks = 50, horizon = 0;
  unsigned seed = 1;
  std::string plant;
  double strength = 0.3;
  synth->add_option("--out", out_path, "output CSV path");
  synth->add_option("--days", days, "trading days");
  synth->add_option("--stocks", stocks, "stock count");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--plant", plant, "planted alpha expression");
  synth->add_option("--strength", strength, "planted signal strength in [0,1]");
  synth->add_option("--horizon", horizon, "return horizon (default: config)");

  auto* mine_cmd = app.add_subcommand("mine", "search for alphas");
  std::string data_path;
  mine_cmd->add_option("--data", data_path, "market CSV (default: config csv_path)");

  auto* eval_cmd = app.add_subcommand("eval", "score a mined set");
  std::string mined_path, eval_data, split = "valid";
  eval_cmd->add_option("--mined", mined_path, "mined-set file");
  eval_cmd->add_option("--data", eval_data, "market CSV");
  eval_cmd->add_option("--split", split, "train|valid|test");

  auto* bt = app.add_subcommand("backtest", "combine and backtest a mined set");
  std::string bt_mined, bt_data;
  bt->add_option("--mined", bt_mined, "mined-set file");
  bt->add_option("--data", bt_data, "market CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit 0, usage errors exit 1
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(common, out_path, days, stocks, seed, plant, strength, horizon);
    }
    if (mine_cmd->parsed()) return cmd_mine(common, data_path);
    if (eval_cmd->parsed()) return cmd_eval(common, mined_path, eval_data, split);
    if (bt->parsed()) return cmd_backtest(common, bt_mined, bt_data);
  } catch (const af::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const af::SchemaError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const af::ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const af::EmptyData& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const af::InvalidParams& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const af::MissingFeature& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const af::NoValidRows& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const af::InsufficientStocks& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const af::EmptySeries& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
