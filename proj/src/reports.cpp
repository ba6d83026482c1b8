#include "alphaforge/reports.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "alphaforge/errors.hpp"

namespace alphaforge {

namespace {

using nlohmann::json;

double or_nan(const json& j, const char* key) {
  return j.contains(key) && j.at(key).is_number() ? j.at(key).get<double>()
                                                  : std::numeric_limits<double>::quiet_NaN();
}

json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void summarize(const std::vector<double>& xs, double& mean, double& stddev) {
  mean = 0.0;
  stddev = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  stddev = std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace

void write_mined_set(const std::string& path, const MinedAlphaSet& mined,
                     const Dataset& dataset, EvalCache* cache) {
  std::ofstream out(path);
  if (!out) throw EmptyData("cannot open '" + path + "' for writing");
  const SplitRange valid = dataset.splits.valid;
  Eigen::MatrixXd target_valid;
  if (valid.size() > 0) {
    target_valid = dataset.target.middleRows(valid.begin, valid.size());
  }
  int rank = 0;
  for (const auto& record : mined.records()) {
    double valid_ic = std::numeric_limits<double>::quiet_NaN();
    if (valid.size() > 0) {
      EvalContext ctx{dataset, valid, cache};
      valid_ic = ic(evaluate(record.tree, ctx), target_valid);
    }
    json j{
        {"rank", ++rank},
        {"program", serialize(record.program)},
        {"expression", tree_to_string(record.tree)},
        {"train_ic", number_or_null(record.ic)},
        {"valid_ic", number_or_null(valid_ic)},
        {"perf_at_mining", number_or_null(record.perf_at_mining)},
    };
    out << j.dump() << '\n';
  }
}

MinedAlphaSet read_mined_set(const std::string& path, const OpsConfig& ops,
                             const DimRules& rules, const Dataset& dataset,
                             EvalCache* cache) {
  std::ifstream in(path);
  if (!in) throw EmptyData("cannot open mined-set file '" + path + "'");
  MinedAlphaSet mined;
  const SplitRange train = dataset.splits.train;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad mined-set record: ") + e.what(), line_no);
    }
    AlphaRecord record;
    record.program = parse(j.at("program").get<std::string>(), ops);
    record.tree = compile(record.program, ops, rules);
    EvalContext ctx{dataset, train, cache};
    record.values = evaluate(record.tree, ctx);
    record.ic = or_nan(j, "train_ic");
    record.perf_at_mining = or_nan(j, "perf_at_mining");
    mined.add(std::move(record));
  }
  return mined;
}

json eval_report(const MinedAlphaSet& mined, const Dataset& dataset, SplitRange range,
                 EvalCache* cache) {
  const Eigen::MatrixXd target = dataset.target.middleRows(range.begin, range.size());
  std::vector<Eigen::MatrixXd> values;
  EvalContext ctx{dataset, range, cache};
  for (const auto& record : mined.records()) {
    values.push_back(evaluate(record.tree, ctx));
  }

  json alphas = json::array();
  std::vector<double> ics;
  for (int i = 0; i < mined.size(); ++i) {
    const double a_ic = ic(values[i], target);
    const double a_rank_ic = rank_ic(values[i], target);
    if (std::isfinite(a_ic)) ics.push_back(a_ic);
    alphas.push_back(json{
        {"rank", i + 1},
        {"expression", tree_to_string(mined.records()[i].tree)},
        {"ic", number_or_null(a_ic)},
        {"rank_ic", number_or_null(a_rank_ic)},
    });
  }

  json corr_rows = json::array();
  std::vector<double> corrs;
  for (int i = 0; i < mined.size(); ++i) {
    for (int j = i + 1; j < mined.size(); ++j) {
      const double c = ic(values[i], values[j]);
      if (std::isfinite(c)) corrs.push_back(c);
      corr_rows.push_back(json{{"a", i + 1}, {"b", j + 1}, {"ic", number_or_null(c)}});
    }
  }

  double ic_mean, ic_std, corr_mean, corr_std;
  summarize(ics, ic_mean, ic_std);
  summarize(corrs, corr_mean, corr_std);

  return json{
      {"alphas", alphas},
      {"pairwise", corr_rows},
      {"summary",
       {{"ic_mean", ic_mean},
        {"ic_std", ic_std},
        {"corr_mean", corr_mean},
        {"corr_std", corr_std},
        {"count", mined.size()}}},
  };
}

void write_backtest_csv(const std::string& path, const BacktestOutput& output) {
  std::ofstream out(path);
  if (!out) throw EmptyData("cannot open '" + path + "' for writing");
  out << "date,portfolio_return,cumulative_return,turnover\n";
  double wealth = 1.0;
  for (std::size_t i = 0; i < output.dates.size(); ++i) {
    wealth *= 1.0 + output.daily_returns[i];
    out << output.dates[i] << ',' << format_double(output.daily_returns[i]) << ','
        << format_double(wealth - 1.0) << ',' << format_double(output.turnover[i])
        << '\n';
  }
}

}  // namespace alphaforge
