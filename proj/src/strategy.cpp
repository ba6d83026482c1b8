#include "alphaforge/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "alphaforge/errors.hpp"

namespace alphaforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void RidgeCombiner::fit(const std::vector<Eigen::MatrixXd>& alphas,
                        const Eigen::MatrixXd& target) {
  const int n_alphas = static_cast<int>(alphas.size());
  if (n_alphas == 0) throw NoValidRows("no alphas to combine");

  // Collect rows where every alpha and the target are finite.
  std::vector<std::pair<int, int>> rows;
  for (Eigen::Index d = 0; d < target.rows(); ++d) {
    for (Eigen::Index i = 0; i < target.cols(); ++i) {
      if (!std::isfinite(target(d, i))) continue;
      bool ok = true;
      for (const auto& a : alphas) {
        if (!std::isfinite(a(d, i))) {
          ok = false;
          break;
        }
      }
      if (ok) rows.emplace_back(static_cast<int>(d), static_cast<int>(i));
    }
  }
  if (rows.empty()) throw NoValidRows("no jointly finite (day,stock) rows");

  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd X(n, n_alphas);
  Eigen::VectorXd y(n);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < n_alphas; ++j) X(r, j) = alphas[j](rows[r].first, rows[r].second);
    y(r) = target(rows[r].first, rows[r].second);
  }

  feature_mean_ = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - feature_mean_.transpose();
  feature_std_ = (centered.array().square().colwise().sum() / n).sqrt();
  for (int j = 0; j < n_alphas; ++j) {
    if (!(feature_std_(j) > 0)) feature_std_(j) = 1.0;  // constant column
  }
  Eigen::MatrixXd Xs = centered.array().rowwise() / feature_std_.transpose().array();

  target_mean_ = y.mean();
  Eigen::VectorXd yc = y.array() - target_mean_;

  Eigen::MatrixXd gram = Xs.transpose() * Xs;
  gram.diagonal().array() += lambda_;
  weights_ = gram.ldlt().solve(Xs.transpose() * yc);
}

Eigen::MatrixXd RidgeCombiner::predict(const std::vector<Eigen::MatrixXd>& alphas) const {
  if (static_cast<int>(alphas.size()) != weights_.size()) {
    throw ShapeMismatch("combiner was fit on " + std::to_string(weights_.size()) +
                        " alphas, got " + std::to_string(alphas.size()));
  }
  const Eigen::Index D = alphas[0].rows(), S = alphas[0].cols();
  Eigen::MatrixXd signal = Eigen::MatrixXd::Constant(D, S, kNaN);
  for (Eigen::Index d = 0; d < D; ++d) {
    for (Eigen::Index i = 0; i < S; ++i) {
      double acc = target_mean_;
      bool ok = true;
      for (int j = 0; j < weights_.size(); ++j) {
        const double v = alphas[j](d, i);
        if (!std::isfinite(v)) {
          ok = false;
          break;
        }
        acc += weights_(j) * (v - feature_mean_(j)) / feature_std_(j);
      }
      if (ok) signal(d, i) = acc;
    }
  }
  return signal;
}

Eigen::MatrixXd CombinedSignal::predict(const Dataset& dataset, SplitRange range,
                                        EvalCache* cache) const {
  std::vector<Eigen::MatrixXd> values;
  values.reserve(trees.size());
  EvalContext ctx{dataset, range, cache};
  for (const auto& tree : trees) values.push_back(evaluate(tree, ctx));
  return model->predict(values);
}

CombinedSignal combine_fit(const MinedAlphaSet& mined, const Dataset& dataset,
                           const StrategyConfig& cfg, EvalCache* cache) {
  if (mined.empty()) throw NoValidRows("mined alpha set is empty");

  std::vector<int> order(mined.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return mined.records()[a].ic > mined.records()[b].ic;
  });
  const int used = std::min<int>(cfg.alphas_used, mined.size());
  order.resize(used);

  CombinedSignal out;
  out.selected_records = order;
  for (int idx : order) out.trees.push_back(mined.records()[idx].tree);

  const SplitRange train = dataset.splits.train;
  std::vector<Eigen::MatrixXd> train_values;
  EvalContext ctx{dataset, train, cache};
  for (const auto& tree : out.trees) train_values.push_back(evaluate(tree, ctx));
  Eigen::MatrixXd target_train = dataset.target.middleRows(train.begin, train.size());

  auto model = std::make_unique<RidgeCombiner>(cfg.ridge_lambda);
  model->fit(train_values, target_train);
  out.model = std::move(model);
  return out;
}

// ---------------------------------------------------------------------------
// Top-k / drop-n backtest
// ---------------------------------------------------------------------------

BacktestOutput run_backtest(const Eigen::MatrixXd& signal, const Dataset& dataset,
                            SplitRange range, const StrategyConfig& cfg) {
  if (signal.rows() != range.size() ||
      signal.cols() != dataset.stock_count()) {
    throw ShapeMismatch("signal shape does not match the requested day range");
  }
  if (range.size() < 2) throw EmptySeries("backtest needs at least 2 days");
  if (cfg.drop_n > cfg.top_k) throw ConfigError("drop_n must not exceed top_k");

  const Eigen::MatrixXd& close = dataset.feature("close");
  const int S = dataset.stock_count();
  BacktestOutput out;

  std::set<int> held;
  for (int t = 0; t + 1 < range.size(); ++t) {
    const int day = range.begin + t;

    // Rank by signal, best first; NaN-signal names are untradable.
    std::vector<int> ranked;
    for (int i = 0; i < S; ++i) {
      if (std::isfinite(signal(t, i))) ranked.push_back(i);
    }
    std::sort(ranked.begin(), ranked.end(), [&](int a, int b) {
      if (signal(t, a) != signal(t, b)) return signal(t, a) > signal(t, b);
      return a < b;
    });

    int swaps = 0;
    if (held.empty()) {
      if (static_cast<int>(ranked.size()) < cfg.top_k) {
        throw InsufficientStocks("day one has " + std::to_string(ranked.size()) +
                                 " tradable names, need " + std::to_string(cfg.top_k));
      }
      held.insert(ranked.begin(), ranked.begin() + cfg.top_k);
    } else {
      // Sell candidates: held names, worst-ranked first (NaN signal worst).
      std::vector<int> held_sorted(held.begin(), held.end());
      auto held_score = [&](int i) {
        return std::isfinite(signal(t, i))
                   ? signal(t, i)
                   : -std::numeric_limits<double>::infinity();
      };
      std::sort(held_sorted.begin(), held_sorted.end(), [&](int a, int b) {
        if (held_score(a) != held_score(b)) return held_score(a) < held_score(b);
        return a < b;
      });
      // Buy candidates: best-ranked names not held.
      std::vector<int> buyable;
      for (int i : ranked) {
        if (!held.count(i)) buyable.push_back(i);
      }
      for (std::size_t k = 0; k < held_sorted.size() && k < buyable.size(); ++k) {
        if (swaps >= cfg.drop_n) break;
        if (held_score(buyable[k]) <= held_score(held_sorted[k])) break;
        held.erase(held_sorted[k]);
        held.insert(buyable[k]);
        ++swaps;
      }
    }

    double sum = 0;
    int n = 0;
    for (int i : held) {
      const double c0 = close(day, i);
      const double c1 = close(day + 1, i);
      if (std::isfinite(c0) && std::isfinite(c1) && c0 > 0) {
        sum += c1 / c0 - 1.0;
        ++n;
      }
    }
    out.dates.push_back(dataset.days[day]);
    out.daily_returns.push_back(n > 0 ? sum / n : 0.0);
    out.turnover.push_back(static_cast<double>(swaps) / cfg.top_k);
    out.holdings.emplace_back(held.begin(), held.end());
  }

  out.stats = backtest_stats(out.daily_returns, out.turnover);
  return out;
}

}  // namespace alphaforge
