#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "alphaforge/data.hpp"
#include "alphaforge/evaluator.hpp"
#include "alphaforge/metrics.hpp"

namespace alphaforge {

struct StrategyConfig {
  int top_k = 50;
  int drop_n = 5;
  int alphas_used = 20;       // best-IC records fed to the combiner
  double ridge_lambda = 1e-3;
};

/// Maps a stack of alpha-value panels to one signal panel. fit() consumes
/// per-(day,stock) rows where every alpha and the target are finite;
/// predict() preserves the input panel shape (NaN where any alpha is NaN).
class CombinerModel {
 public:
  virtual ~CombinerModel() = default;
  virtual void fit(const std::vector<Eigen::MatrixXd>& alphas,
                   const Eigen::MatrixXd& target) = 0;
  virtual Eigen::MatrixXd predict(const std::vector<Eigen::MatrixXd>& alphas) const = 0;
};

/// Closed-form ridge regression on train-standardized alpha columns with a
/// centered target; lambda -> infinity shrinks to the constant target mean.
class RidgeCombiner final : public CombinerModel {
 public:
  explicit RidgeCombiner(double lambda) : lambda_(lambda) {}

  void fit(const std::vector<Eigen::MatrixXd>& alphas,
           const Eigen::MatrixXd& target) override;
  Eigen::MatrixXd predict(const std::vector<Eigen::MatrixXd>& alphas) const override;

  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  double lambda_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd feature_mean_;
  Eigen::VectorXd feature_std_;
  double target_mean_ = 0.0;
};

/// Fitted combination of the top records by mining IC: the selected trees
/// plus the trained combiner, able to produce the signal on any day range.
struct CombinedSignal {
  std::vector<int> selected_records;
  std::vector<ExprTreePtr> trees;
  std::unique_ptr<CombinerModel> model;

  Eigen::MatrixXd predict(const Dataset& dataset, SplitRange range,
                          EvalCache* cache = nullptr) const;
};

/// Selects the top `alphas_used` records by mining-time IC and fits the
/// ridge combiner on the training split. Throws NoValidRows when no
/// (day,stock) row has all alphas and the target finite.
CombinedSignal combine_fit(const MinedAlphaSet& mined, const Dataset& dataset,
                           const StrategyConfig& cfg, EvalCache* cache = nullptr);

struct BacktestOutput {
  std::vector<std::string> dates;      // decision dates (size = split days - 1)
  std::vector<double> daily_returns;   // next-day portfolio returns
  std::vector<double> turnover;        // swapped fraction per day
  std::vector<std::vector<int>> holdings;  // stock indices held each day
  BacktestStats stats;
};

/// Top-k/drop-n daily portfolio over `range`: rank by signal each day, hold
/// the k best equal-weighted, swapping at most n names per day
/// (worst-ranked holdings out, best-ranked outsiders in, only when the
/// outsider ranks better). Day-d decisions earn close-to-close returns into
/// day d+1. Throws InsufficientStocks when day one has fewer than k
/// tradable names.
BacktestOutput run_backtest(const Eigen::MatrixXd& signal, const Dataset& dataset,
                            SplitRange range, const StrategyConfig& cfg);

}  // namespace alphaforge
