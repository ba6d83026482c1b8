#pragma once

#include <string>

#include <json.hpp>

#include "alphaforge/data.hpp"
#include "alphaforge/evaluator.hpp"
#include "alphaforge/metrics.hpp"
#include "alphaforge/strategy.hpp"

namespace alphaforge {

/// Mined-set file: one JSON object per line with the program text and the
/// scores recorded at mining time plus the validation-split IC.
void write_mined_set(const std::string& path, const MinedAlphaSet& mined,
                     const Dataset& dataset, EvalCache* cache = nullptr);

/// Rebuilds a MinedAlphaSet from a mined-set file; record values are
/// re-evaluated on the dataset's training split. Throws ParseError.
MinedAlphaSet read_mined_set(const std::string& path, const OpsConfig& ops,
                             const DimRules& rules, const Dataset& dataset,
                             EvalCache* cache = nullptr);

/// Per-alpha IC / Rank IC on a split, the pairwise IC matrix, and mean/std
/// summaries of both.
nlohmann::json eval_report(const MinedAlphaSet& mined, const Dataset& dataset,
                           SplitRange range, EvalCache* cache = nullptr);

/// `date,portfolio_return,cumulative_return,turnover` rows.
void write_backtest_csv(const std::string& path, const BacktestOutput& output);

}  // namespace alphaforge
