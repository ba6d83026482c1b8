#include "alphaforge/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "alphaforge/errors.hpp"
#include "alphaforge/evaluator.hpp"

namespace alphaforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Civil-date helpers for generating weekday labels.
long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, int& y, int& m, int& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long yy = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

std::vector<std::string> weekday_labels(int count) {
  std::vector<std::string> out;
  out.reserve(count);
  long z = days_from_civil(2018, 1, 2);  // a Tuesday
  while (static_cast<int>(out.size()) < count) {
    const int dow = static_cast<int>(((z % 7) + 11) % 7);  // 0 = Monday
    if (dow < 5) {
      int y, m, d;
      civil_from_days(z, y, m, d);
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
      out.emplace_back(buf);
    }
    ++z;
  }
  return out;
}

std::string format_cell(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Mean per-day Pearson correlation; local copy used only for generator
// calibration (the metrics module is the public implementation).
double mean_day_corr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double total = 0;
  int days = 0;
  for (Eigen::Index d = 0; d < a.rows(); ++d) {
    double sa = 0, sb = 0;
    int n = 0;
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      if (std::isfinite(a(d, i)) && std::isfinite(b(d, i))) {
        sa += a(d, i);
        sb += b(d, i);
        ++n;
      }
    }
    if (n < 3) continue;
    const double ma = sa / n, mb = sb / n;
    double cab = 0, va = 0, vb = 0;
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      if (std::isfinite(a(d, i)) && std::isfinite(b(d, i))) {
        const double x = a(d, i) - ma, y = b(d, i) - mb;
        cab += x * y;
        va += x * x;
        vb += y * y;
      }
    }
    if (va <= 0 || vb <= 0) continue;
    total += cab / std::sqrt(va * vb);
    ++days;
  }
  return days == 0 ? kNaN : total / days;
}

}  // namespace

const Eigen::MatrixXd& Dataset::feature(const std::string& name) const {
  auto it = features.find(name);
  if (it == features.end()) {
    throw MissingFeature("dataset has no feature '" + name + "'");
  }
  return it->second;
}

Eigen::MatrixXd forward_return(const Eigen::MatrixXd& close, int horizon) {
  Eigen::MatrixXd mu = Eigen::MatrixXd::Constant(close.rows(), close.cols(), kNaN);
  for (Eigen::Index d = 0; d + horizon < close.rows(); ++d) {
    for (Eigen::Index i = 0; i < close.cols(); ++i) {
      const double c0 = close(d, i);
      const double c1 = close(d + horizon, i);
      if (std::isfinite(c0) && std::isfinite(c1) && c0 > 0) {
        mu(d, i) = c1 / c0 - 1.0;
      }
    }
  }
  return mu;
}

Splits fractional_splits(int day_count, double train_frac, double valid_frac) {
  if (train_frac <= 0 || valid_frac < 0 || train_frac + valid_frac >= 1.0) {
    throw ConfigError("split fractions must satisfy 0 < train, 0 <= valid, train+valid < 1");
  }
  const int t = static_cast<int>(day_count * train_frac);
  const int v = static_cast<int>(day_count * valid_frac);
  Splits s;
  s.train = {0, t};
  s.valid = {t, t + v};
  s.test = {t + v, day_count};
  if (s.train.size() <= 0 || s.test.size() <= 0) {
    throw ConfigError("split fractions leave an empty train or test range");
  }
  return s;
}

namespace {

SplitRange range_for(const std::vector<std::string>& days, const std::string& from,
                     const std::string& to) {
  auto lo = std::lower_bound(days.begin(), days.end(), from);
  auto hi = std::upper_bound(days.begin(), days.end(), to);
  return SplitRange{static_cast<int>(lo - days.begin()),
                    static_cast<int>(hi - days.begin())};
}

}  // namespace

Splits date_splits(const std::vector<std::string>& days, const std::string& train_from,
                   const std::string& train_to, const std::string& valid_from,
                   const std::string& valid_to, const std::string& test_from,
                   const std::string& test_to) {
  Splits s;
  s.train = range_for(days, train_from, train_to);
  s.valid = range_for(days, valid_from, valid_to);
  s.test = range_for(days, test_from, test_to);
  if (s.train.size() <= 0 || s.test.size() <= 0) {
    throw ConfigError("date splits produce an empty train or test range");
  }
  if (s.train.end > s.valid.begin || s.valid.end > s.test.begin) {
    throw ConfigError("date splits must be disjoint and ordered train < valid < test");
  }
  return s;
}

Dataset load_csv(const std::string& path, const std::vector<std::string>& features,
                 int horizon) {
  std::ifstream in(path);
  if (!in) throw EmptyData("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw EmptyData("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) header.push_back(tok);
  }
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw SchemaError("missing column '" + name + "' in '" + path + "'");
    }
    return static_cast<int>(it - header.begin());
  };
  const int date_col = column("date");
  const int symbol_col = column("symbol");
  std::vector<int> feature_cols;
  for (const auto& f : features) feature_cols.push_back(column(f));

  struct Row {
    std::string date;
    std::string symbol;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  std::set<std::string> dates;
  std::set<std::string> symbols;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      auto comma = line.find(',', pos);
      cells.push_back(line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " cells, got " +
                           std::to_string(cells.size()),
                       line_no);
    }
    Row row;
    row.date = cells[date_col];
    row.symbol = cells[symbol_col];
    for (int c : feature_cols) {
      const std::string& cell = cells[c];
      if (cell.empty()) {
        row.values.push_back(kNaN);
        continue;
      }
      const char* begin = cell.c_str();
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin || *end != '\0') {
        throw ParseError("cannot parse number '" + cell + "'", line_no);
      }
      row.values.push_back(v);
    }
    dates.insert(row.date);
    symbols.insert(row.symbol);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyData("'" + path + "' has no data rows");

  Dataset ds;
  ds.days.assign(dates.begin(), dates.end());
  ds.stocks.assign(symbols.begin(), symbols.end());
  ds.horizon = horizon;
  const int D = ds.day_count(), S = ds.stock_count();
  for (const auto& f : features) {
    ds.features[f] = Eigen::MatrixXd::Constant(D, S, kNaN);
  }
  std::map<std::string, int> day_index, stock_index;
  for (int d = 0; d < D; ++d) day_index[ds.days[d]] = d;
  for (int i = 0; i < S; ++i) stock_index[ds.stocks[i]] = i;

  for (const auto& row : rows) {
    const int d = day_index[row.date];
    const int i = stock_index[row.symbol];
    for (std::size_t k = 0; k < features.size(); ++k) {
      ds.features[features[k]](d, i) = row.values[k];
    }
  }
  if (ds.has_feature("close")) {
    ds.target = forward_return(ds.feature("close"), horizon);
  } else {
    ds.target = Eigen::MatrixXd::Constant(D, S, kNaN);
  }
  ds.splits = fractional_splits(D, 0.6, 0.2);
  return ds;
}

void save_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw EmptyData("cannot open '" + path + "' for writing");
  std::vector<std::string> names;
  for (const auto& [name, _] : dataset.features) names.push_back(name);

  out << "date,symbol";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (int d = 0; d < dataset.day_count(); ++d) {
    for (int i = 0; i < dataset.stock_count(); ++i) {
      bool any = false;
      for (const auto& n : names) {
        if (std::isfinite(dataset.features.at(n)(d, i))) {
          any = true;
          break;
        }
      }
      if (!any) continue;
      out << dataset.days[d] << ',' << dataset.stocks[i];
      for (const auto& n : names) out << ',' << format_cell(dataset.features.at(n)(d, i));
      out << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Synthetic market
// ---------------------------------------------------------------------------

namespace {

struct NoiseBank {
  Eigen::MatrixXd eta;   // signal latent innovations
  Eigen::MatrixXd eps;   // return noise
  Eigen::MatrixXd nu;    // gap noise
  Eigen::MatrixXd uh;    // upper wick
  Eigen::MatrixXd ul;    // lower wick
  Eigen::MatrixXd uv;    // vwap position in [0,1]
  Eigen::MatrixXd lv;    // volume latent innovations
  Eigen::VectorXd p0;    // initial prices
  Eigen::VectorXd vbase; // per-stock volume scale
};

NoiseBank draw_noise(unsigned seed, int days, int stocks) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.05, 0.95);
  NoiseBank nb;
  auto fill_normal = [&](Eigen::MatrixXd& m) {
    m.resize(days, stocks);
    for (int d = 0; d < days; ++d) {
      for (int i = 0; i < stocks; ++i) m(d, i) = normal(rng);
    }
  };
  fill_normal(nb.eta);
  fill_normal(nb.eps);
  fill_normal(nb.nu);
  fill_normal(nb.uh);
  fill_normal(nb.ul);
  nb.uv.resize(days, stocks);
  for (int d = 0; d < days; ++d) {
    for (int i = 0; i < stocks; ++i) nb.uv(d, i) = uniform(rng);
  }
  fill_normal(nb.lv);
  nb.p0.resize(stocks);
  nb.vbase.resize(stocks);
  for (int i = 0; i < stocks; ++i) nb.p0(i) = 20.0 * std::exp(0.5 * normal(rng));
  for (int i = 0; i < stocks; ++i) {
    nb.vbase(i) = 1e6 * std::exp(0.8 * normal(rng));
  }
  return nb;
}

// Cross-sectionally standardize one row; rows with fewer than 3 finite
// values or no spread become zeros.
Eigen::VectorXd standardize_row(const Eigen::VectorXd& row) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(row.size());
  double sum = 0;
  int n = 0;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (std::isfinite(row(i))) {
      sum += row(i);
      ++n;
    }
  }
  if (n < 3) return out;
  const double mean = sum / n;
  double ss = 0;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (std::isfinite(row(i))) ss += (row(i) - mean) * (row(i) - mean);
  }
  const double sd = std::sqrt(ss / n);
  if (sd <= 0) return out;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (std::isfinite(row(i))) out(i) = (row(i) - mean) / sd;
  }
  return out;
}

// Removes the components of `v` along `basis` directions (modified
// Gram-Schmidt). Keeps daily return shocks orthogonal to the static
// cross-sections (price level, volume), which would otherwise pick up
// spurious correlation with overlapping multi-day forward returns.
void project_orthogonal(Eigen::VectorXd& v, std::vector<Eigen::VectorXd> basis) {
  for (std::size_t b = 0; b < basis.size(); ++b) {
    for (std::size_t a = 0; a < b; ++a) {
      basis[b] -= basis[a].dot(basis[b]) * basis[a];
    }
    const double norm = basis[b].norm();
    if (norm < 1e-12) {
      basis[b].setZero();
      continue;
    }
    basis[b] /= norm;
    v -= basis[b].dot(v) * basis[b];
  }
}

// Generation constants.
constexpr double kPhi = 0.9;         // signal latent persistence
constexpr double kSigmaR = 0.02;     // daily return volatility
constexpr double kDrift = 0.0002;
constexpr double kSigmaGap = 0.004;  // overnight gap volatility (pure noise)
constexpr double kWickBase = 0.002;
constexpr double kWickVol = 0.010;
constexpr double kVolPhi = 0.8;      // volume latent persistence
constexpr double kVolSigma = 0.4;

Dataset generate_once(const SynthParams& p, const NoiseBank& nb, double kappa) {
  const int D = p.days, S = p.stocks;
  Dataset ds;
  ds.days = weekday_labels(D);
  for (int i = 0; i < S; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "S%04d", i);
    ds.stocks.emplace_back(buf);
  }
  ds.horizon = p.horizon;
  for (const char* f : {"open", "close", "high", "low", "volume", "vwap"}) {
    ds.features[f] = Eigen::MatrixXd::Constant(D, S, kNaN);
  }
  Eigen::MatrixXd& open = ds.features["open"];
  Eigen::MatrixXd& close = ds.features["close"];
  Eigen::MatrixXd& high = ds.features["high"];
  Eigen::MatrixXd& low = ds.features["low"];
  Eigen::MatrixXd& volume = ds.features["volume"];
  Eigen::MatrixXd& vwap = ds.features["vwap"];

  // Persistent latents.
  Eigen::MatrixXd theta(D, S);
  Eigen::MatrixXd vol_latent(D, S);
  for (int i = 0; i < S; ++i) {
    theta(0, i) = nb.eta(0, i);
    vol_latent(0, i) = nb.lv(0, i);
    for (int d = 1; d < D; ++d) {
      theta(d, i) = kPhi * theta(d - 1, i) + std::sqrt(1 - kPhi * kPhi) * nb.eta(d, i);
      vol_latent(d, i) =
          kVolPhi * vol_latent(d - 1, i) + std::sqrt(1 - kVolPhi * kVolPhi) * nb.lv(d, i);
    }
  }

  const bool planted = p.planted_alpha != nullptr && kappa != 0.0;
  const double noise_mix = std::sqrt(std::max(0.0, 1.0 - kappa * kappa));

  auto make_bar = [&](int d, int i, double prev_close, double ret, double gap) {
    const double c = prev_close * std::exp(ret);
    const double o = prev_close * std::exp(gap);
    const double body_hi = std::max(o, c);
    const double body_lo = std::min(o, c);
    const double h = body_hi * std::exp(kWickBase + kWickVol * std::abs(nb.uh(d, i)));
    const double l = body_lo * std::exp(-(kWickBase + kWickVol * std::abs(nb.ul(d, i))));
    open(d, i) = o;
    close(d, i) = c;
    high(d, i) = h;
    low(d, i) = l;
    vwap(d, i) = l + nb.uv(d, i) * (h - l);
    volume(d, i) = nb.vbase(i) * std::exp(kVolSigma * vol_latent(d, i));
  };

  for (int i = 0; i < S; ++i) make_bar(0, i, nb.p0(i), 0.0, 0.0);

  for (int d = 1; d < D; ++d) {
    // Signal available at the end of day d-1.
    Eigen::VectorXd theta_z = standardize_row(theta.row(d - 1));
    Eigen::VectorXd src = theta_z;
    if (planted) {
      // Alpha values on day d-1 from bars generated so far.
      Eigen::MatrixXd alpha =
          evaluate(*p.planted_alpha, EvalContext{ds, SplitRange{d - 1, d}, nullptr});
      Eigen::VectorXd alpha_z = standardize_row(alpha.row(0).transpose());
      src = standardize_row(theta_z + alpha_z);
    }
    Eigen::VectorXd shocks = nb.eps.row(d).transpose();
    {
      Eigen::VectorXd log_level(S), raw_level(S), log_vol(S), raw_vol(S);
      for (int i = 0; i < S; ++i) {
        log_level(i) = std::log(close(d - 1, i));
        raw_level(i) = close(d - 1, i);
        log_vol(i) = std::log(volume(d - 1, i));
        raw_vol(i) = volume(d - 1, i);
      }
      project_orthogonal(
          shocks, {Eigen::VectorXd::Ones(S), log_level, raw_level, log_vol, raw_vol});
    }
    for (int i = 0; i < S; ++i) {
      const double signal = planted ? kappa * src(i) : 0.0;
      const double noise = planted ? noise_mix : 1.0;
      const double ret = kDrift + kSigmaR * (signal + noise * shocks(i));
      const double gap = kSigmaGap * nb.nu(d, i);
      make_bar(d, i, close(d - 1, i), ret, gap);
    }
  }

  ds.target = forward_return(close, p.horizon);
  ds.splits = fractional_splits(D, p.train_frac, p.valid_frac);
  return ds;
}

}  // namespace

Dataset synth_market(const SynthParams& p) {
  if (p.days < 40 || p.stocks < 10) {
    throw InvalidParams("synth_market needs days >= 40 and stocks >= 10");
  }
  if (p.signal_strength < 0 || p.signal_strength > 1) {
    throw InvalidParams("signal_strength must lie in [0,1]");
  }
  if (p.horizon < 1 || p.horizon >= p.days) {
    throw InvalidParams("horizon must lie in [1, days)");
  }

  const NoiseBank nb = draw_noise(p.seed, p.days, p.stocks);

  if (p.planted_alpha == nullptr || p.signal_strength == 0.0) {
    return generate_once(p, nb, 0.0);
  }

  // Proportional calibration of the signal loading toward the requested
  // per-day correlation; fixed iteration count keeps generation
  // deterministic.
  double kappa = std::min(0.9, p.signal_strength);
  Dataset ds = generate_once(p, nb, kappa);
  for (int iter = 0; iter < 3; ++iter) {
    Eigen::MatrixXd alpha = evaluate(*p.planted_alpha, EvalContext::full(ds));
    const double achieved = mean_day_corr(alpha, ds.target);
    if (!std::isfinite(achieved) || achieved <= 0) break;
    const double ratio =
        std::clamp(p.signal_strength / achieved, 0.25, 4.0);
    if (std::abs(ratio - 1.0) < 0.02) break;
    kappa = std::clamp(kappa * ratio, 0.01, 0.98);
    ds = generate_once(p, nb, kappa);
  }
  return ds;
}

}  // namespace alphaforge
