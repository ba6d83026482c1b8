#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "alphaforge/program.hpp"

namespace alphaforge {

/// (days x stocks) real matrix with shared axis labels. NaN marks missing
/// cells. Day labels are strictly increasing ISO-8601 dates.
struct PanelMatrix {
  std::vector<std::string> days;
  std::vector<std::string> stocks;
  Eigen::MatrixXd values;  // rows: days, cols: stocks

  int day_count() const { return static_cast<int>(days.size()); }
  int stock_count() const { return static_cast<int>(stocks.size()); }
};

/// Half-open row range [begin, end) into the shared day axis.
struct SplitRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

struct Splits {
  SplitRange train;
  SplitRange valid;
  SplitRange test;
};

/// Immutable market panel: one matrix per raw feature plus the forward
/// return target, all on identical day/stock axes.
struct Dataset {
  std::vector<std::string> days;
  std::vector<std::string> stocks;
  std::map<std::string, Eigen::MatrixXd> features;
  Eigen::MatrixXd target;  // forward return, NaN on the last `horizon` days
  int horizon = 20;
  Splits splits;

  int day_count() const { return static_cast<int>(days.size()); }
  int stock_count() const { return static_cast<int>(stocks.size()); }
  const Eigen::MatrixXd& feature(const std::string& name) const;
  bool has_feature(const std::string& name) const {
    return features.count(name) > 0;
  }
};

/// Forward simple return over `horizon` days:
/// mu[d,i] = close[d+horizon,i] / close[d,i] - 1, NaN when either endpoint
/// is missing/non-positive or d+horizon is out of range.
Eigen::MatrixXd forward_return(const Eigen::MatrixXd& close, int horizon);

/// Splits by fractional day counts (train, then valid, remainder test).
Splits fractional_splits(int day_count, double train_frac, double valid_frac);
/// Splits by inclusive ISO-date ranges; days outside every range are
/// assigned to no split. Throws ConfigError when ranges are not ordered
/// train < valid < test or overlap.
Splits date_splits(const std::vector<std::string>& days,
                   const std::string& train_from, const std::string& train_to,
                   const std::string& valid_from, const std::string& valid_to,
                   const std::string& test_from, const std::string& test_to);

/// Loads `date,symbol,open,high,low,close,volume,vwap` rows (any order) into
/// a Dataset. Missing (day,symbol) pairs become NaN in every feature.
/// Throws SchemaError, ParseError (with row number), EmptyData.
Dataset load_csv(const std::string& path, const std::vector<std::string>& features,
                 int horizon);

/// Re-emits a Dataset in the load_csv schema (cells that are NaN in every
/// feature are omitted as missing rows).
void save_csv(const Dataset& dataset, const std::string& path);

struct SynthParams {
  unsigned seed = 1;
  int days = 250;
  int stocks = 50;
  ExprTreePtr planted_alpha;      // optional
  double signal_strength = 0.0;   // target per-day corr(alpha, target)
  int horizon = 20;
  double train_frac = 0.6;
  double valid_frac = 0.2;
};

/// Synthetic market generator: per-stock geometric random walks with
/// consistent OHLC bars (low <= open,close,vwap <= high; volume > 0).
/// When a planted alpha is given, future returns are driven by a persistent
/// latent that the alpha picks up, calibrated so the per-day correlation
/// between alpha values and the forward-return target is close to
/// signal_strength. Deterministic per seed. Throws InvalidParams.
Dataset synth_market(const SynthParams& params);

}  // namespace alphaforge
