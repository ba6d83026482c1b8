#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "alphaforge/program.hpp"

namespace alphaforge {

/// Mean per-day Pearson correlation between alpha values and forward
/// returns. Days with fewer than 3 jointly finite pairs or zero variance on
/// either side are skipped; NaN when no day qualifies.
/// Throws ShapeMismatch.
double ic(const Eigen::MatrixXd& z, const Eigen::MatrixXd& mu);

/// Fraction of finite cells; the support an alpha's scores rest on.
double finite_fraction(const Eigen::MatrixXd& z);

/// ic on per-day average-tie ranks of both sides (Spearman).
double rank_ic(const Eigen::MatrixXd& z, const Eigen::MatrixXd& mu);

/// One mined alpha: program, compiled tree, its values on the evaluation
/// split, and the scores recorded at mining time.
struct AlphaRecord {
  AlphaProgram program;
  ExprTreePtr tree;
  Eigen::MatrixXd values;
  double ic = 0.0;
  double perf_at_mining = 0.0;
};

/// Fingerprint-deduplicated, insertion-ordered set of mined alphas.
class MinedAlphaSet {
 public:
  const std::vector<AlphaRecord>& records() const { return records_; }
  int size() const { return static_cast<int>(records_.size()); }
  bool empty() const { return records_.empty(); }
  bool contains(std::uint64_t fp) const { return fingerprints_.count(fp) > 0; }
  /// Returns false (and drops the record) on a duplicate fingerprint.
  bool add(AlphaRecord record);

 private:
  std::vector<AlphaRecord> records_;
  std::unordered_set<std::uint64_t> fingerprints_;
};

/// max_i ic(z, G_i); 0 for an empty set. Pairs whose ic is NaN are skipped.
/// With abs_corr the maximum runs over |ic|.
double max_corr(const Eigen::MatrixXd& z, const MinedAlphaSet& mined,
                bool abs_corr = false);

/// Diversity-discounted objective (1 - max_corr(z, G)) * ic(z, mu);
/// 0 when ic is NaN. With use_diversity_discount off this is plain ic.
double perf(const Eigen::MatrixXd& z, const Eigen::MatrixXd& mu,
            const MinedAlphaSet& mined, bool abs_corr = false,
            bool use_diversity_discount = true);

struct BacktestStats {
  double cumulative = 0.0;     // prod(1+r) - 1
  double sharpe = 0.0;         // mean/std * sqrt(252), 0 when std == 0
  double mdd = 0.0;            // max relative peak-to-trough drawdown
  double turnover_mean = 0.0;  // mean of the supplied per-day turnover
};

/// Summary statistics of a daily return series (turnover series may be
/// empty). Throws EmptySeries.
BacktestStats backtest_stats(std::span<const double> daily_returns,
                             std::span<const double> turnover = {});

}  // namespace alphaforge
