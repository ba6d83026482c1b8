#include "alphaforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "alphaforge/errors.hpp"

namespace alphaforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_shapes(const Eigen::MatrixXd& z, const Eigen::MatrixXd& mu) {
  if (z.rows() != mu.rows() || z.cols() != mu.cols()) {
    throw ShapeMismatch("panel shapes differ: " + std::to_string(z.rows()) + "x" +
                        std::to_string(z.cols()) + " vs " + std::to_string(mu.rows()) +
                        "x" + std::to_string(mu.cols()));
  }
}

// Pearson correlation over the jointly finite pairs of one day; NaN when
// fewer than 3 pairs or either side has zero variance.
double day_corr(const Eigen::MatrixXd& z, const Eigen::MatrixXd& mu, Eigen::Index d) {
  double sz = 0, sm = 0;
  int n = 0;
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    if (std::isfinite(z(d, i)) && std::isfinite(mu(d, i))) {
      sz += z(d, i);
      sm += mu(d, i);
      ++n;
    }
  }
  if (n < 3) return kNaN;
  const double mz = sz / n, mm = sm / n;
  double c = 0, vz = 0, vm = 0;
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    if (std::isfinite(z(d, i)) && std::isfinite(mu(d, i))) {
      const double a = z(d, i) - mz, b = mu(d, i) - mm;
      c += a * b;
      vz += a * a;
      vm += b * b;
    }
  }
  if (vz <= 0 || vm <= 0) return kNaN;
  return c / std::sqrt(vz * vm);
}

// Average-tie ranks of the finite cells of one day, written over a NaN row.
void day_ranks(const Eigen::MatrixXd& x, Eigen::Index d, Eigen::VectorXd& out) {
  out.setConstant(x.cols(), kNaN);
  std::vector<int> cols;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    if (std::isfinite(x(d, i))) cols.push_back(static_cast<int>(i));
  }
  std::sort(cols.begin(), cols.end(),
            [&](int a, int b) { return x(d, a) < x(d, b); });
  std::size_t i = 0;
  while (i < cols.size()) {
    std::size_t j = i + 1;
    while (j < cols.size() && x(d, cols[j]) == x(d, cols[i])) ++j;
    const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) out(cols[k]) = avg;
    i = j;
  }
}

}  // namespace

double ic(const Eigen::MatrixXd& z, const Eigen::MatrixXd& mu) {
  check_shapes(z, mu);
  double total = 0;
  int days = 0;
  for (Eigen::Index d = 0; d < z.rows(); ++d) {
    const double c = day_corr(z, mu, d);
    if (std::isfinite(c)) {
      total += c;
      ++days;
    }
  }
  return days == 0 ? kNaN : total / days;
}

double finite_fraction(const Eigen::MatrixXd& z) {
  if (z.size() == 0) return 0.0;
  return static_cast<double>(z.array().isFinite().count()) /
         static_cast<double>(z.size());
}

double rank_ic(const Eigen::MatrixXd& z, const Eigen::MatrixXd& mu) {
  check_shapes(z, mu);
  Eigen::VectorXd rz, rm;
  Eigen::MatrixXd zr(1, z.cols()), mr(1, z.cols());
  double total = 0;
  int days = 0;
  for (Eigen::Index d = 0; d < z.rows(); ++d) {
    // Rank only the jointly finite pairs so both sides rank the same names.
    Eigen::MatrixXd zd(1, z.cols()), md(1, z.cols());
    for (Eigen::Index i = 0; i < z.cols(); ++i) {
      const bool ok = std::isfinite(z(d, i)) && std::isfinite(mu(d, i));
      zd(0, i) = ok ? z(d, i) : kNaN;
      md(0, i) = ok ? mu(d, i) : kNaN;
    }
    day_ranks(zd, 0, rz);
    day_ranks(md, 0, rm);
    zr.row(0) = rz.transpose();
    mr.row(0) = rm.transpose();
    const double c = day_corr(zr, mr, 0);
    if (std::isfinite(c)) {
      total += c;
      ++days;
    }
  }
  return days == 0 ? kNaN : total / days;
}

bool MinedAlphaSet::add(AlphaRecord record) {
  const std::uint64_t fp = fingerprint(record.tree);
  if (fingerprints_.count(fp)) return false;
  fingerprints_.insert(fp);
  records_.push_back(std::move(record));
  return true;
}

double max_corr(const Eigen::MatrixXd& z, const MinedAlphaSet& mined, bool abs_corr) {
  if (mined.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& record : mined.records()) {
    const double c = ic(z, record.values);
    if (!std::isfinite(c)) continue;
    best = std::max(best, abs_corr ? std::abs(c) : c);
    any = true;
  }
  return any ? best : 0.0;
}

double perf(const Eigen::MatrixXd& z, const Eigen::MatrixXd& mu,
            const MinedAlphaSet& mined, bool abs_corr, bool use_diversity_discount) {
  const double score = ic(z, mu);
  if (!std::isfinite(score)) return 0.0;
  if (!use_diversity_discount) return score;
  return (1.0 - max_corr(z, mined, abs_corr)) * score;
}

BacktestStats backtest_stats(std::span<const double> daily_returns,
                             std::span<const double> turnover) {
  if (daily_returns.empty()) throw EmptySeries("daily return series is empty");
  BacktestStats stats;

  double wealth = 1.0;
  double peak = 1.0;
  double mdd = 0.0;
  double sum = 0.0;
  for (double r : daily_returns) {
    wealth *= 1.0 + r;
    peak = std::max(peak, wealth);
    mdd = std::max(mdd, (peak - wealth) / peak);
    sum += r;
  }
  stats.cumulative = wealth - 1.0;
  stats.mdd = mdd;

  const auto n = static_cast<double>(daily_returns.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double r : daily_returns) ss += (r - mean) * (r - mean);
  const double sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  stats.sharpe = sd > 0 ? mean / sd * std::sqrt(252.0) : 0.0;

  if (!turnover.empty()) {
    stats.turnover_mean =
        std::accumulate(turnover.begin(), turnover.end(), 0.0) /
        static_cast<double>(turnover.size());
  }
  return stats;
}

}  // namespace alphaforge
