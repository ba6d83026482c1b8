#include "alphaforge/config.hpp"

#include <fstream>

#include "alphaforge/errors.hpp"

namespace alphaforge {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& scope,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("'" + scope + "' must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown key '" + key + "' in '" + scope + "'");
  }
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  check_keys(j, "config",
             {"seed", "data", "ops", "dimensions", "mdp", "search", "strategy",
              "paths"});
  get_to(j, "seed", cfg.seed);

  if (j.contains("data")) {
    const json& d = j.at("data");
    check_keys(d, "data",
               {"csv_path", "horizon", "features", "split_mode", "train_frac",
                "valid_frac", "train_from", "train_to", "valid_from", "valid_to",
                "test_from", "test_to"});
    get_to(d, "csv_path", cfg.data.csv_path);
    get_to(d, "horizon", cfg.data.horizon);
    get_to(d, "features", cfg.data.features);
    get_to(d, "split_mode", cfg.data.split_mode);
    get_to(d, "train_frac", cfg.data.train_frac);
    get_to(d, "valid_frac", cfg.data.valid_frac);
    get_to(d, "train_from", cfg.data.train_from);
    get_to(d, "train_to", cfg.data.train_to);
    get_to(d, "valid_from", cfg.data.valid_from);
    get_to(d, "valid_to", cfg.data.valid_to);
    get_to(d, "test_from", cfg.data.test_from);
    get_to(d, "test_to", cfg.data.test_to);
  }
  cfg.ops.features = cfg.data.features;

  if (j.contains("ops")) {
    const json& o = j.at("ops");
    check_keys(o, "ops", {"constant_pool", "register_count", "max_length"});
    get_to(o, "constant_pool", cfg.ops.constant_pool);
    get_to(o, "register_count", cfg.ops.register_count);
    get_to(o, "max_length", cfg.ops.max_length);
  }

  if (j.contains("dimensions")) {
    const json& d = j.at("dimensions");
    check_keys(d, "dimensions", {"exponent_bound", "feature_dims"});
    get_to(d, "exponent_bound", cfg.exponent_bound);
    if (d.contains("feature_dims")) {
      for (const auto& [name, arr] : d.at("feature_dims").items()) {
        std::array<int, 3> e{};
        arr.get_to(e);
        cfg.feature_dims[name] = e;
      }
    }
  }

  if (j.contains("mdp")) {
    const json& m = j.at("mdp");
    check_keys(m, "mdp",
               {"gamma", "use_diversity_discount", "abs_corr", "min_coverage"});
    get_to(m, "gamma", cfg.mdp.gamma);
    get_to(m, "min_coverage", cfg.mdp.min_coverage);
    get_to(m, "use_diversity_discount", cfg.mdp.use_diversity_discount);
    get_to(m, "abs_corr", cfg.mdp.abs_corr);
  }

  if (j.contains("search")) {
    const json& s = j.at("search");
    check_keys(s, "search",
               {"beta", "backup_k", "simulations_per_move", "c_puct", "max_episodes",
                "alphas_to_mine", "ic_threshold", "target_ic", "dirichlet_alpha",
                "dirichlet_weight", "guidance", "train_batch",
                "train_steps_per_episode", "learning_rate", "replay_capacity",
                "hidden_width"});
    get_to(s, "beta", cfg.search.beta);
    get_to(s, "backup_k", cfg.search.backup_k);
    get_to(s, "simulations_per_move", cfg.search.simulations_per_move);
    get_to(s, "c_puct", cfg.search.c_puct);
    get_to(s, "max_episodes", cfg.search.max_episodes);
    get_to(s, "alphas_to_mine", cfg.search.alphas_to_mine);
    get_to(s, "ic_threshold", cfg.search.ic_threshold);
    get_to(s, "target_ic", cfg.search.target_ic);
    get_to(s, "dirichlet_alpha", cfg.search.dirichlet_alpha);
    get_to(s, "dirichlet_weight", cfg.search.dirichlet_weight);
    get_to(s, "guidance", cfg.guidance);
    get_to(s, "train_batch", cfg.search.train_batch);
    get_to(s, "train_steps_per_episode", cfg.search.train_steps_per_episode);
    get_to(s, "learning_rate", cfg.search.learning_rate);
    get_to(s, "replay_capacity", cfg.search.replay_capacity);
    get_to(s, "hidden_width", cfg.search.hidden_width);
  }
  cfg.search.seed = cfg.seed;

  if (j.contains("strategy")) {
    const json& s = j.at("strategy");
    check_keys(s, "strategy", {"top_k", "drop_n", "alphas_used", "ridge_lambda"});
    get_to(s, "top_k", cfg.strategy.top_k);
    get_to(s, "drop_n", cfg.strategy.drop_n);
    get_to(s, "alphas_used", cfg.strategy.alphas_used);
    get_to(s, "ridge_lambda", cfg.strategy.ridge_lambda);
  }

  if (j.contains("paths")) {
    const json& p = j.at("paths");
    check_keys(p, "paths", {"mined_set", "search_log", "backtest_csv", "eval_report"});
    get_to(p, "mined_set", cfg.paths.mined_set);
    get_to(p, "search_log", cfg.paths.search_log);
    get_to(p, "backtest_csv", cfg.paths.backtest_csv);
    get_to(p, "eval_report", cfg.paths.eval_report);
  }

  cfg.validate();
  return cfg;
}

nlohmann::json RunConfig::to_json() const {
  json dims_json = json::object();
  {
    DimRules rules = dim_rules();
    for (const auto& [name, dim] : rules.feature_table()) {
      dims_json[name] = {dim.currency_exp(), dim.shares_exp(), dim.time_exp()};
    }
  }
  return json{
      {"seed", seed},
      {"data",
       {{"csv_path", data.csv_path},
        {"horizon", data.horizon},
        {"features", data.features},
        {"split_mode", data.split_mode},
        {"train_frac", data.train_frac},
        {"valid_frac", data.valid_frac},
        {"train_from", data.train_from},
        {"train_to", data.train_to},
        {"valid_from", data.valid_from},
        {"valid_to", data.valid_to},
        {"test_from", data.test_from},
        {"test_to", data.test_to}}},
      {"ops",
       {{"constant_pool", ops.constant_pool},
        {"register_count", ops.register_count},
        {"max_length", ops.max_length}}},
      {"dimensions",
       {{"exponent_bound", exponent_bound}, {"feature_dims", dims_json}}},
      {"mdp",
       {{"gamma", mdp.gamma},
        {"use_diversity_discount", mdp.use_diversity_discount},
        {"abs_corr", mdp.abs_corr},
        {"min_coverage", mdp.min_coverage}}},
      {"search",
       {{"beta", search.beta},
        {"backup_k", search.backup_k},
        {"simulations_per_move", search.simulations_per_move},
        {"c_puct", search.c_puct},
        {"max_episodes", search.max_episodes},
        {"alphas_to_mine", search.alphas_to_mine},
        {"ic_threshold", search.ic_threshold},
        {"target_ic", search.target_ic},
        {"dirichlet_alpha", search.dirichlet_alpha},
        {"dirichlet_weight", search.dirichlet_weight},
        {"guidance", guidance},
        {"train_batch", search.train_batch},
        {"train_steps_per_episode", search.train_steps_per_episode},
        {"learning_rate", search.learning_rate},
        {"replay_capacity", search.replay_capacity},
        {"hidden_width", search.hidden_width}}},
      {"strategy",
       {{"top_k", strategy.top_k},
        {"drop_n", strategy.drop_n},
        {"alphas_used", strategy.alphas_used},
        {"ridge_lambda", strategy.ridge_lambda}}},
      {"paths",
       {{"mined_set", paths.mined_set},
        {"search_log", paths.search_log},
        {"backtest_csv", paths.backtest_csv},
        {"eval_report", paths.eval_report}}},
  };
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << to_json().dump(2) << '\n';
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(data.horizon >= 1, "data.horizon must be >= 1");
  require(!data.features.empty(), "data.features must not be empty");
  require(data.split_mode == "fraction" || data.split_mode == "date",
          "data.split_mode must be 'fraction' or 'date'");
  require(ops.register_count >= 2, "ops.register_count must be >= 2");
  require(ops.max_length >= 4, "ops.max_length must be >= 4");
  require(!ops.constant_pool.empty(), "ops.constant_pool must not be empty");
  require(!ops.window_pool().empty(),
          "ops.constant_pool must contain at least one positive integer window");
  require(exponent_bound >= 1, "dimensions.exponent_bound must be >= 1");
  require(mdp.gamma > 0 && mdp.gamma < 1, "mdp.gamma must lie in (0,1)");
  require(mdp.min_coverage >= 0 && mdp.min_coverage < 1,
          "mdp.min_coverage must lie in [0,1)");
  require(search.beta >= 0 && search.beta <= 1, "search.beta must lie in [0,1]");
  require(search.backup_k >= 1, "search.backup_k must be >= 1");
  require(search.simulations_per_move >= 1,
          "search.simulations_per_move must be >= 1");
  require(search.c_puct >= 0, "search.c_puct must be >= 0");
  require(search.max_episodes >= 1, "search.max_episodes must be >= 1");
  require(search.alphas_to_mine >= 1, "search.alphas_to_mine must be >= 1");
  require(guidance == "network" || guidance == "uniform",
          "search.guidance must be 'network' or 'uniform'");
  require(search.train_batch >= 1, "search.train_batch must be >= 1");
  require(search.replay_capacity >= search.train_batch,
          "search.replay_capacity must be >= train_batch");
  require(search.hidden_width >= 1, "search.hidden_width must be >= 1");
  require(strategy.top_k >= 1, "strategy.top_k must be >= 1");
  require(strategy.drop_n >= 0 && strategy.drop_n <= strategy.top_k,
          "strategy.drop_n must lie in [0, top_k]");
  require(strategy.alphas_used >= 1, "strategy.alphas_used must be >= 1");
  require(strategy.ridge_lambda >= 0, "strategy.ridge_lambda must be >= 0");
  dim_rules();  // throws when a feature has no dimension entry
}

DimRules RunConfig::dim_rules() const {
  DimRules rules = DimRules::defaults();
  rules.set_exponent_bound(exponent_bound);
  for (const auto& [name, e] : feature_dims) {
    rules.set_feature_dimension(name, Dimension(e[0], e[1], e[2]));
  }
  for (const auto& f : data.features) {
    if (!rules.has_feature(f)) {
      throw ConfigError("feature '" + f + "' has no dimension entry");
    }
  }
  return rules;
}

void RunConfig::apply_splits(Dataset& dataset) const {
  if (data.split_mode == "fraction") {
    dataset.splits =
        fractional_splits(dataset.day_count(), data.train_frac, data.valid_frac);
  } else {
    dataset.splits =
        date_splits(dataset.days, data.train_from, data.train_to, data.valid_from,
                    data.valid_to, data.test_from, data.test_to);
  }
}

}  // namespace alphaforge
