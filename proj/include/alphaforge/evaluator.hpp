#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <unordered_map>

#include "alphaforge/data.hpp"
#include "alphaforge/program.hpp"

namespace alphaforge {

/// Exact memo of full-panel subtree evaluations, keyed by the canonical
/// tree text so hits are guaranteed to be the same expression. Cleared
/// wholesale when it outgrows its cap. Not thread-safe; use one per worker.
class EvalCache {
 public:
  explicit EvalCache(std::size_t max_entries = 4096) : max_entries_(max_entries) {}

  const Eigen::MatrixXd* find(const std::string& key) const;
  void insert(const std::string& key, Eigen::MatrixXd value);
  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

 private:
  std::size_t max_entries_;
  std::unordered_map<std::string, Eigen::MatrixXd> entries_;
};

/// Evaluation context: the dataset, the day range evaluated results are
/// restricted to, and an optional shared subtree cache.
struct EvalContext {
  const Dataset& dataset;
  SplitRange day_range;        // rows of the returned matrix
  EvalCache* cache = nullptr;  // optional

  static EvalContext full(const Dataset& ds, EvalCache* cache = nullptr) {
    return EvalContext{ds, SplitRange{0, ds.day_count()}, cache};
  }
};

/// Evaluates `tree` over the context's dataset and returns the rows in
/// ctx.day_range. Rolling operators look strictly backward, so values inside
/// the range are identical whether or not earlier days exist.
///
/// Cell semantics (NaN in, NaN out, for every operator):
///   Add/Sub/Mul cell-wise; Div yields NaN where the divisor is 0.
///   Abs/Sign cell-wise; Ln yields NaN for non-positive input.
///   CsRank: per-day average-tie rank of finite cells scaled to [0,1]
///     ((rank-1)/(n-1); 0.5 when a day has a single finite cell).
///   TsMean/TsStd/TsMax/TsMin(x,w): trailing w-day window per stock; NaN
///     unless all w values are finite. TsStd is the sample standard
///     deviation (w-1 denominator), so w=1 gives NaN.
///   TsDelta(x,w)[d] = x[d] - x[d-w].
///   TsRank(x,w): rank of x[d] within its trailing window, scaled as CsRank.
///   TsCorr/TsCov(x,y,w): trailing-window Pearson correlation / sample
///     covariance; correlation is NaN where either series has zero variance
///     (window spread at float-rounding level, relative std below ~1e-12,
///     counts as zero).
///
/// Throws MissingFeature and WindowNotInteger.
Eigen::MatrixXd evaluate(const ExprTree& tree, const EvalContext& ctx);
inline Eigen::MatrixXd evaluate(const ExprTreePtr& tree, const EvalContext& ctx) {
  return evaluate(*tree, ctx);
}

}  // namespace alphaforge
