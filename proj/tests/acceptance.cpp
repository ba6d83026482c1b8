// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line. Run via ctest or directly; build alphaforge_cli first
// (criterion 10 drives the installed binary).

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "alphaforge/config.hpp"
#include "alphaforge/errors.hpp"
#include "alphaforge/reports.hpp"
#include "alphaforge/search.hpp"
#include "helpers.hpp"
#include "reference_eval.hpp"

using namespace alphaforge;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

void report(int criterion, const std::string& name, bool ok, const Timer& timer,
            const std::string& detail = "") {
  std::printf("ACCEPTANCE %2d %-34s %s (%.1fs)%s%s\n", criterion, name.c_str(),
              ok ? "PASS" : "FAIL", timer.seconds(), detail.empty() ? "" : " - ",
              detail.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", criterion, " (", name, ") failed ", detail);
}

double oracle_ic(const Eigen::MatrixXd& z, const Eigen::MatrixXd& mu) {
  double total = 0;
  int days = 0;
  for (int d = 0; d < z.rows(); ++d) {
    std::vector<double> xs, ys;
    for (int i = 0; i < z.cols(); ++i) {
      if (std::isfinite(z(d, i)) && std::isfinite(mu(d, i))) {
        xs.push_back(z(d, i));
        ys.push_back(mu(d, i));
      }
    }
    if (xs.size() < 3) continue;
    const int n = static_cast<int>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double cov = 0, vx = 0, vy = 0;
    for (int i = 0; i < n; ++i) {
      cov += (xs[i] - mx) * (ys[i] - my);
      vx += (xs[i] - mx) * (xs[i] - mx);
      vy += (ys[i] - my) * (ys[i] - my);
    }
    if (vx <= 0 || vy <= 0) continue;
    total += cov / std::sqrt(vx * vy);
    ++days;
  }
  return days == 0 ? std::numeric_limits<double>::quiet_NaN() : total / days;
}

std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<int> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = 0.5 * (i + 1 + j);
    i = j;
  }
  return ranks;
}

double oracle_rank_ic(const Eigen::MatrixXd& z, const Eigen::MatrixXd& mu) {
  Eigen::MatrixXd rz = Eigen::MatrixXd::Constant(z.rows(), z.cols(), NAN);
  Eigen::MatrixXd rm = rz;
  for (int d = 0; d < z.rows(); ++d) {
    std::vector<double> xs, ys;
    std::vector<int> cols;
    for (int i = 0; i < z.cols(); ++i) {
      if (std::isfinite(z(d, i)) && std::isfinite(mu(d, i))) {
        xs.push_back(z(d, i));
        ys.push_back(mu(d, i));
        cols.push_back(i);
      }
    }
    auto rx = oracle_ranks(xs);
    auto ry = oracle_ranks(ys);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      rz(d, cols[k]) = rx[k];
      rm(d, cols[k]) = ry[k];
    }
  }
  return oracle_ic(rz, rm);
}

Dataset planted_dataset(unsigned seed, int days, int stocks, double strength) {
  SynthParams p;
  p.seed = seed;
  p.days = days;
  p.stocks = stocks;
  p.horizon = 20;
  p.signal_strength = strength;
  p.planted_alpha = parse_expression("(close-open)/(high-low)", OpsConfig{}.features);
  return synth_market(p);
}

double mean_pairwise_abs_ic(const MinedAlphaSet& mined) {
  double total = 0;
  int count = 0;
  for (int i = 0; i < mined.size(); ++i) {
    for (int j = i + 1; j < mined.size(); ++j) {
      const double c = ic(mined.records()[i].values, mined.records()[j].values);
      if (std::isfinite(c)) {
        total += std::abs(c);
        ++count;
      }
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : total / count;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ALPHAFORGE_CLI_PATH) + " " + args + " > /dev/null";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("criterion 1: ic oracle equivalence") {
  Timer timer;
  std::mt19937 rng(1001);
  double worst_ic = 0, worst_rank = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd z = testing::random_panel(20, 15, rng);
    Eigen::MatrixXd mu = testing::random_panel(20, 15, rng);
    if (trial % 4 == 0) z(trial % 20, trial % 15) = NAN;
    worst_ic = std::max(worst_ic, std::abs(ic(z, mu) - oracle_ic(z, mu)));
    worst_rank = std::max(worst_rank, std::abs(rank_ic(z, mu) - oracle_rank_ic(z, mu)));
  }
  const bool ok = worst_ic <= 1e-12 && worst_rank <= 1e-12 && timer.seconds() < 5;
  char detail[128];
  std::snprintf(detail, sizeof detail, "max |ic err| %.2e, |rank_ic err| %.2e",
                worst_ic, worst_rank);
  report(1, "ic oracle equivalence", ok, timer, detail);
}

TEST_CASE("criterion 2: program semantics") {
  Timer timer;
  OpsConfig ops;
  DimRules rules = DimRules::defaults();
  bool ok = true;
  std::string detail;

  // The example program equals the direct formula everywhere.
  Dataset ds = testing::random_dataset(40, 12, 2002, 0.04);
  AlphaProgram table2 = parse(
      "Start,Null,Null,Null\nSub,close,open,Null\nSub,high,low,Null\n"
      "Div,Reg0,Reg1,Null\nEnd,Null,Null,Null\n",
      ops);
  Eigen::MatrixXd compiled = evaluate(compile(table2, ops, rules), EvalContext::full(ds));
  Eigen::ArrayXXd direct =
      (ds.feature("close").array() - ds.feature("open").array()) /
      (ds.feature("high").array() - ds.feature("low").array());
  for (int d = 0; d < 40 && ok; ++d) {
    for (int i = 0; i < 12 && ok; ++i) {
      const bool both_nan = std::isnan(compiled(d, i)) && std::isnan(direct(d, i));
      if (!both_nan && !(std::abs(compiled(d, i) - direct(d, i)) <= 1e-12)) {
        ok = false;
        detail = "table-2 program diverges from the direct formula";
      }
    }
  }

  // 1000 random valid programs: round-trip and reference-evaluator match.
  OpsConfig small = ops;
  small.max_length = 9;
  std::mt19937 rng(2003);
  Dataset panel = testing::random_dataset(30, 10, 2004, 0.05);
  panel.features["volume"] /= 1e6;  // quote volume in millions of shares
  int checked = 0;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    AlphaProgram p = testing::random_valid_program(rng, small, &rules);
    if (!(parse(serialize(p), small) == p)) {
      ok = false;
      detail = "serialize/parse round-trip failed";
      break;
    }
    RegisterFileState st = RegisterFileState::initial(small);
    for (const auto& instr : p.instructions()) {
      st = apply_instruction(st, instr, small, rules);
    }
    if (!st.slot(0).occupied()) continue;
    ++checked;
    Eigen::MatrixXd fast = evaluate(st.slot(0).tree, EvalContext::full(panel));
    Eigen::MatrixXd slow = testing::reference_evaluate(*st.slot(0).tree, panel);
    for (int d = 0; d < fast.rows() && ok; ++d) {
      for (int i = 0; i < fast.cols() && ok; ++i) {
        const bool na = std::isnan(fast(d, i)), nb = std::isnan(slow(d, i));
        if (na != nb) {
          ok = false;
          detail = "NaN pattern mismatch vs reference";
        } else if (!na) {
          const double scale =
              std::max({1.0, std::abs(fast(d, i)), std::abs(slow(d, i))});
          if (std::abs(fast(d, i) - slow(d, i)) > 1e-9 * scale) {
            ok = false;
            detail = "value mismatch vs reference";
          }
        }
      }
    }
  }
  ok = ok && checked > 800 && timer.seconds() < 30;
  report(2, "program semantics", ok, timer,
         detail.empty() ? std::to_string(checked) + " programs matched" : detail);
}

TEST_CASE("criterion 3: dimension pruning") {
  Timer timer;
  OpsConfig ops;
  DimRules rules = DimRules::defaults();
  std::mt19937 rng(3001);

  int strictly_smaller = 0;
  bool subset_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    RegisterFileState s = testing::random_reachable_state(rng, ops, &rules);
    const auto filtered = enumerate_actions(s, ops, &rules);
    const auto unfiltered = enumerate_actions(s, ops, nullptr);
    if (filtered.size() > unfiltered.size()) subset_ok = false;
    if (filtered.size() < unfiltered.size()) ++strictly_smaller;
  }

  // The worked pruning example: Reg0 holds close-open (currency).
  RegisterFileState s = RegisterFileState::initial(ops);
  s = apply_instruction(s, Instruction(Op::Start), ops, rules);
  s = apply_instruction(
      s, Instruction(Op::Sub, Operand::matrix("close"), Operand::matrix("open")), ops,
      rules);
  const auto actions = enumerate_actions(s, ops, &rules);
  const bool add_high_legal =
      std::find(actions.begin(), actions.end(),
                Instruction(Op::Add, Operand::reg(0), Operand::matrix("high"))) !=
      actions.end();
  const bool add_volume_illegal =
      std::find(actions.begin(), actions.end(),
                Instruction(Op::Add, Operand::reg(0), Operand::matrix("volume"))) ==
      actions.end();

  const bool ok = subset_ok && strictly_smaller >= 95 && add_high_legal &&
                  add_volume_illegal && timer.seconds() < 10;
  report(3, "dimension pruning", ok, timer,
         "strictly smaller in " + std::to_string(strictly_smaller) + "/100 states");
}

TEST_CASE("criterion 4: q-value and top-k backup") {
  Timer timer;
  bool ok = true;

  std::mt19937 rng(4001);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 50);
  std::uniform_int_distribution<int> ks(1, 16);
  for (int trial = 0; trial < 10000 && ok; ++trial) {
    const int k = ks(rng);
    ValueBackup backup(k);
    std::vector<double> all;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      const double v = normal(rng);
      all.push_back(v);
      backup.insert(v);
    }
    std::sort(all.begin(), all.end(), std::greater<>{});
    all.resize(std::min<std::size_t>(all.size(), k));
    if (backup.sorted_values() != all) ok = false;

    // Retained max is exact; the mean matches a re-summation to 1e-12.
    double sum = 0;
    for (double v : all) sum += v;
    if (backup.max() != all.front()) ok = false;
    if (std::abs(backup.mean() - sum / static_cast<double>(all.size())) > 1e-12) {
      ok = false;
    }

    // At the beta extremes the other statistic drops out exactly.
    SearchNode node{EnvState{}, k};
    node.reward = normal(rng) * 0.01;
    node.reward_known = true;
    for (double v : all) node.backup.insert(v);
    if (q_value(node, 1.0) != node.reward + node.backup.mean()) ok = false;
    if (q_value(node, 0.0) != node.reward + node.backup.max()) ok = false;
  }
  ok = ok && timer.seconds() < 5;
  report(4, "q-value and top-k backup", ok, timer, "10000 sequences vs sort oracle");
}

TEST_CASE("criterion 5: diversity mechanism") {
  Timer timer;

  // Identical values to a mined record score exactly zero.
  std::mt19937 rng(5001);
  Eigen::MatrixXd z = testing::random_panel(15, 12, rng);
  Eigen::MatrixXd mu = testing::random_panel(15, 12, rng);
  MinedAlphaSet g;
  AlphaRecord r;
  r.tree = ExprTree::make_leaf(Operand::matrix("close"));
  r.values = z;
  g.add(std::move(r));
  const bool zero_ok = perf(z, mu, g) == 0.0;

  // Same data, same seed, discount on vs off. Trained guidance makes the
  // contrast sharp: without the discount the policy re-mines one family.
  Dataset ds = planted_dataset(11, 160, 30, 0.3);
  OpsConfig ops;
  ops.max_length = 8;
  DimRules rules = DimRules::defaults();
  SearchConfig cfg;
  cfg.simulations_per_move = 32;
  cfg.max_episodes = 150;
  cfg.alphas_to_mine = 8;
  cfg.ic_threshold = 0.05;
  cfg.seed = 17;

  auto run = [&](bool discount) {
    MdpConfig mdp;
    mdp.use_diversity_discount = discount;
    ActionVocabulary vocab(ops);
    AlphaEnv env(ds, ops, rules, vocab, mdp, nullptr, nullptr);
    PolicyValueNet guidance(env.encoding_size(), 64, vocab.size(), cfg.seed);
    return mine(ds, ops, rules, mdp, cfg, guidance, nullptr);
  };
  MiningOutcome with = run(true);
  MiningOutcome without = run(false);
  const double corr_with = mean_pairwise_abs_ic(with.mined);
  const double corr_without = mean_pairwise_abs_ic(without.mined);
  const bool diversity_ok = with.mined.size() >= 2 && without.mined.size() >= 2 &&
                            std::isfinite(corr_with) && std::isfinite(corr_without) &&
                            corr_with < corr_without;

  const bool ok = zero_ok && diversity_ok && timer.seconds() < 600;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "mean pairwise |ic|: %.4f (discount on, %d alphas) vs %.4f (off, %d)",
                corr_with, with.mined.size(), corr_without, without.mined.size());
  report(5, "diversity mechanism", ok, timer, detail);
}

TEST_CASE("criterion 6: planted-signal recovery") {
  Timer timer;
  Dataset ds = planted_dataset(1, 250, 50, 0.3);
  OpsConfig ops;
  DimRules rules = DimRules::defaults();
  MdpConfig mdp;

  SearchConfig cfg;
  cfg.simulations_per_move = 48;
  cfg.alphas_to_mine = 1000000;  // never the stop reason
  cfg.ic_threshold = 0.02;
  cfg.target_ic = 0.27;
  cfg.seed = 7;

  ActionVocabulary vocab(ops);
  AlphaEnv probe_env(ds, ops, rules, vocab, mdp, nullptr, nullptr);

  cfg.max_episodes = 2000;
  PolicyValueNet net(probe_env.encoding_size(), cfg.hidden_width, vocab.size(),
                     cfg.seed);
  MiningOutcome guided = mine(ds, ops, rules, mdp, cfg, net, nullptr);

  cfg.max_episodes = 5000;
  UniformGuidance uniform(vocab.size());
  MiningOutcome unguided = mine(ds, ops, rules, mdp, cfg, uniform, nullptr);

  auto best_mined = [](const MiningOutcome& outcome) {
    double best = 0;
    for (const auto& r : outcome.mined.records()) best = std::max(best, r.ic);
    return best;
  };
  const bool ok = guided.best_train_ic >= 0.27 && unguided.best_train_ic >= 0.27 &&
                  best_mined(guided) >= 0.27 && best_mined(unguided) >= 0.27 &&
                  timer.seconds() < 1800;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "guided ic %.4f in %d episodes; uniform ic %.4f in %d episodes",
                guided.best_train_ic, guided.episodes_run, unguided.best_train_ic,
                unguided.episodes_run);
  report(6, "planted-signal recovery", ok, timer, detail);
}

TEST_CASE("criterion 7: reward telescoping") {
  Timer timer;
  Dataset ds = planted_dataset(3, 120, 20, 0.3);
  OpsConfig ops;
  ops.max_length = 10;
  DimRules rules = DimRules::defaults();
  ActionVocabulary vocab(ops);
  MinedAlphaSet mined;
  EvalCache cache;
  AlphaEnv env(ds, ops, rules, vocab, MdpConfig{}, &mined, &cache);

  std::mt19937 rng(7001);
  double worst = 0;
  for (int episode = 0; episode < 100; ++episode) {
    EnvState s = env.reset();
    double total = 0;
    while (!s.terminal) {
      auto actions = env.legal_actions(s);
      std::uniform_int_distribution<int> pick(0, static_cast<int>(actions.size()) - 1);
      auto [next, reward] = env.step(s, actions[pick(rng)]);
      total += reward;
      s = std::move(next);
    }
    worst = std::max(worst, std::abs(total - env.state_perf(s)));
  }
  const bool ok = worst <= 1e-10;
  char detail[64];
  std::snprintf(detail, sizeof detail, "max |sum(r) - perf| = %.2e", worst);
  report(7, "reward telescoping", ok, timer, detail);
}

TEST_CASE("criterion 8: guidance model gradients") {
  Timer timer;
  PolicyValueNet net(6, 8, 2, 8001);
  std::mt19937 rng(8002);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd X(4, 6);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 6; ++c) X(r, c) = normal(rng);
  }
  Eigen::MatrixXd P(4, 2);
  for (int r = 0; r < 4; ++r) {
    const double p = 0.2 + 0.6 * (r / 3.0);
    P(r, 0) = p;
    P(r, 1) = 1 - p;
  }
  Eigen::VectorXd z(4);
  z << 0.1, -0.2, 0.3, 0.0;

  auto [loss, grad] = net.loss_and_gradient(X, P, z);
  Eigen::VectorXd params = net.parameters();
  const double h = 1e-6;
  double worst = 0;
  for (int i = 0; i < params.size(); ++i) {
    Eigen::VectorXd p = params;
    p(i) += h;
    net.set_parameters(p);
    const double up = net.loss(X, P, z);
    p(i) = params(i) - h;
    net.set_parameters(p);
    const double down = net.loss(X, P, z);
    const double fd = (up - down) / (2 * h);
    const double rel =
        std::abs(fd - grad(i)) / std::max(1e-6, std::abs(fd) + std::abs(grad(i)));
    worst = std::max(worst, rel);
  }
  const bool ok = std::isfinite(loss) && worst <= 1e-4;
  char detail[64];
  std::snprintf(detail, sizeof detail, "max relative gradient error %.2e", worst);
  report(8, "guidance model gradients", ok, timer, detail);
}

TEST_CASE("criterion 9: backtest sanity") {
  Timer timer;
  bool ok = true;
  std::string detail;

  // Constant prices: zero cumulative return.
  Dataset flat = testing::random_dataset(40, 10, 9001);
  for (auto& [name, m] : flat.features) m.setConstant(25.0);
  flat.target = forward_return(flat.feature("close"), flat.horizon);
  StrategyConfig cfg;
  cfg.top_k = 4;
  cfg.drop_n = 2;
  std::mt19937 rng(9002);
  Eigen::MatrixXd flat_signal = testing::random_panel(flat.splits.test.size(), 10, rng);
  BacktestOutput flat_out = run_backtest(flat_signal, flat, flat.splits.test, cfg);
  if (flat_out.stats.cumulative != 0.0) {
    ok = false;
    detail = "constant prices gave nonzero return";
  }

  // Perfect foresight beats holding everything, on the same data.
  Dataset ds = testing::random_dataset(60, 20, 9003);
  const SplitRange range{10, 60};
  const Eigen::MatrixXd& close = ds.feature("close");
  Eigen::MatrixXd foresight(range.size(), 20);
  for (int t = 0; t < range.size(); ++t) {
    for (int i = 0; i < 20; ++i) {
      const int d = range.begin + t;
      foresight(t, i) = d + 1 < 60 ? close(d + 1, i) / close(d, i) - 1.0 : 0.0;
    }
  }
  StrategyConfig fs;
  fs.top_k = 5;
  fs.drop_n = 5;
  BacktestOutput fs_out = run_backtest(foresight, ds, range, fs);
  double equal_weight = 1.0;
  for (int t = 0; t + 1 < range.size(); ++t) {
    const int d = range.begin + t;
    double sum = 0;
    for (int i = 0; i < 20; ++i) sum += close(d + 1, i) / close(d, i) - 1.0;
    equal_weight *= 1.0 + sum / 20;
  }
  if (!(fs_out.stats.cumulative > equal_weight - 1.0)) {
    ok = false;
    detail = "foresight did not beat equal weight";
  }

  // MDD against the O(n^2) oracle.
  std::normal_distribution<double> normal(0.0, 0.02);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> r(80);
    for (auto& x : r) x = normal(rng);
    auto stats = backtest_stats(r);
    std::vector<double> wealth{1.0};
    for (double x : r) wealth.push_back(wealth.back() * (1 + x));
    double oracle = 0;
    for (std::size_t i = 0; i < wealth.size(); ++i) {
      for (std::size_t j = i; j < wealth.size(); ++j) {
        oracle = std::max(oracle, (wealth[i] - wealth[j]) / wealth[i]);
      }
    }
    worst = std::max(worst, std::abs(stats.mdd - oracle));
  }
  if (worst > 1e-12) {
    ok = false;
    detail = "mdd differs from oracle";
  }
  report(9, "backtest sanity", ok, timer,
         detail.empty() ? "flat market, foresight bound, mdd oracle" : detail);
}

TEST_CASE("criterion 10: pipeline reproducibility") {
  Timer timer;
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "alphaforge_accept10";
  fs::remove_all(base);

  auto run_pipeline = [&](const std::string& tag) {
    const fs::path dir = base / tag;
    fs::create_directories(dir);
    RunConfig cfg;
    cfg.seed = 5;
    cfg.data.csv_path = (dir / "market.csv").string();
    cfg.data.horizon = 20;
    cfg.ops.max_length = 10;
    cfg.search.simulations_per_move = 16;
    cfg.search.max_episodes = 8;
    cfg.search.alphas_to_mine = 5;
    cfg.search.ic_threshold = 0.01;
    cfg.strategy.top_k = 8;
    cfg.strategy.drop_n = 3;
    cfg.strategy.alphas_used = 5;
    cfg.paths.mined_set = (dir / "mined.jsonl").string();
    cfg.paths.search_log = (dir / "log.jsonl").string();
    cfg.paths.backtest_csv = (dir / "backtest.csv").string();
    cfg.paths.eval_report = (dir / "eval.json").string();
    const std::string cfg_path = (dir / "config.json").string();
    cfg.save(cfg_path);

    bool ok = true;
    ok &= run_cli("--config " + cfg_path + " synth --out " + cfg.data.csv_path +
                  " --seed 5 --days 120 --stocks 30 --plant "
                  "\"(close-open)/(high-low)\" --strength 0.3") == 0;
    ok &= run_cli("--config " + cfg_path + " mine") == 0;
    ok &= run_cli("--config " + cfg_path + " eval --split valid") == 0;
    ok &= run_cli("--config " + cfg_path + " backtest") == 0;
    return ok;
  };

  bool ok = run_pipeline("a") && run_pipeline("b");
  if (ok) {
    const std::string mined_a = slurp((base / "a" / "mined.jsonl").string());
    const std::string mined_b = slurp((base / "b" / "mined.jsonl").string());
    const std::string bt_a = slurp((base / "a" / "backtest.csv").string());
    const std::string bt_b = slurp((base / "b" / "backtest.csv").string());
    ok = !mined_a.empty() && mined_a == mined_b && !bt_a.empty() && bt_a == bt_b;
    report(10, "pipeline reproducibility", ok, timer,
           "mined-set " + std::to_string(mined_a.size()) + "B, backtest " +
               std::to_string(bt_a.size()) + "B, byte-identical across reruns");
  } else {
    report(10, "pipeline reproducibility", false, timer, "a pipeline stage failed");
  }
}
