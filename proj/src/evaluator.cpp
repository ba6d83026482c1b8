#include "alphaforge/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "alphaforge/errors.hpp"

namespace alphaforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite(double v) { return std::isfinite(v); }

// Average-tie ranks of `values`, scaled to [0,1]; single value maps to 0.5.
// `values` must be non-empty and finite.
void scaled_ranks(const std::vector<double>& values, std::vector<double>& out) {
  const std::size_t n = values.size();
  out.assign(n, 0.5);
  if (n == 1) return;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values[a] < values[b]; });
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    const double scaled = (avg_rank - 1.0) / (static_cast<double>(n) - 1.0);
    for (std::size_t k = i; k < j; ++k) out[order[k]] = scaled;
    i = j;
  }
}

int window_from_child(const ExprTree& tree) {
  const ExprTreePtr& child = tree.children[op_window_slot(tree.op)];
  if (!child->leaf || child->operand.kind() != OperandKind::Scalar) {
    throw WindowNotInteger("window operand of " + std::string(op_name(tree.op)) +
                           " must be a scalar");
  }
  const double v = child->operand.scalar_value();
  if (!(v > 0 && v == std::floor(v) && v <= 1e9)) {
    throw WindowNotInteger("window operand of " + std::string(op_name(tree.op)) +
                           " must be a positive integer, got " +
                           child->operand.token());
  }
  return static_cast<int>(v);
}

Eigen::MatrixXd cs_rank(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(x.rows(), x.cols(), kNaN);
  std::vector<double> vals;
  std::vector<int> cols;
  std::vector<double> ranks;
  for (Eigen::Index d = 0; d < x.rows(); ++d) {
    vals.clear();
    cols.clear();
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      if (finite(x(d, i))) {
        vals.push_back(x(d, i));
        cols.push_back(static_cast<int>(i));
      }
    }
    if (vals.empty()) continue;
    scaled_ranks(vals, ranks);
    for (std::size_t k = 0; k < cols.size(); ++k) out(d, cols[k]) = ranks[k];
  }
  return out;
}

template <typename WindowFn>
Eigen::MatrixXd rolling(const Eigen::MatrixXd& x, int w, WindowFn&& fn) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(x.rows(), x.cols(), kNaN);
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    for (Eigen::Index d = w - 1; d < x.rows(); ++d) {
      bool ok = true;
      for (int k = 0; k < w; ++k) {
        if (!finite(x(d - k, i))) {
          ok = false;
          break;
        }
      }
      if (ok) out(d, i) = fn(x, d, i);
    }
  }
  return out;
}

template <typename WindowFn>
Eigen::MatrixXd rolling2(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int w,
                         WindowFn&& fn) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(x.rows(), x.cols(), kNaN);
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    for (Eigen::Index d = w - 1; d < x.rows(); ++d) {
      bool ok = true;
      for (int k = 0; k < w; ++k) {
        if (!finite(x(d - k, i)) || !finite(y(d - k, i))) {
          ok = false;
          break;
        }
      }
      if (ok) out(d, i) = fn(x, y, d, i);
    }
  }
  return out;
}

Eigen::MatrixXd evaluate_full(const ExprTree& tree, const Dataset& ds,
                              EvalCache* cache);

Eigen::MatrixXd evaluate_node(const ExprTree& tree, const Dataset& ds,
                              EvalCache* cache) {
  const Op op = tree.op;

  auto arg = [&](int i) { return evaluate_full(*tree.children[i], ds, cache); };

  switch (op) {
    case Op::Add:
      return arg(0) + arg(1);
    case Op::Sub:
      return arg(0) - arg(1);
    case Op::Mul:
      return (arg(0).array() * arg(1).array()).matrix();
    case Op::Div: {
      Eigen::ArrayXXd a = arg(0).array();
      Eigen::ArrayXXd b = arg(1).array();
      return ((b == 0.0).select(kNaN, a / b)).matrix();
    }
    case Op::Abs:
      return arg(0).array().abs().matrix();
    case Op::Sign:
      return arg(0)
          .unaryExpr([](double v) {
            if (std::isnan(v)) return kNaN;
            return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
          })
          .eval();
    case Op::Ln: {
      Eigen::ArrayXXd a = arg(0).array();
      return ((a > 0.0).select(a.log(), kNaN)).matrix();
    }
    case Op::CsRank:
      return cs_rank(arg(0));
    case Op::TsMean: {
      const int w = window_from_child(tree);
      return rolling(arg(0), w, [w](const Eigen::MatrixXd& x, Eigen::Index d, Eigen::Index i) {
        double s = 0;
        for (int k = 0; k < w; ++k) s += x(d - k, i);
        return s / w;
      });
    }
    case Op::TsStd: {
      const int w = window_from_child(tree);
      return rolling(arg(0), w, [w](const Eigen::MatrixXd& x, Eigen::Index d, Eigen::Index i) {
        if (w < 2) return kNaN;
        double s = 0;
        for (int k = 0; k < w; ++k) s += x(d - k, i);
        const double m = s / w;
        double ss = 0;
        for (int k = 0; k < w; ++k) {
          const double c = x(d - k, i) - m;
          ss += c * c;
        }
        return std::sqrt(ss / (w - 1));
      });
    }
    case Op::TsMax: {
      const int w = window_from_child(tree);
      return rolling(arg(0), w, [w](const Eigen::MatrixXd& x, Eigen::Index d, Eigen::Index i) {
        double m = x(d, i);
        for (int k = 1; k < w; ++k) m = std::max(m, x(d - k, i));
        return m;
      });
    }
    case Op::TsMin: {
      const int w = window_from_child(tree);
      return rolling(arg(0), w, [w](const Eigen::MatrixXd& x, Eigen::Index d, Eigen::Index i) {
        double m = x(d, i);
        for (int k = 1; k < w; ++k) m = std::min(m, x(d - k, i));
        return m;
      });
    }
    case Op::TsDelta: {
      const int w = window_from_child(tree);
      const Eigen::MatrixXd x = arg(0);
      Eigen::MatrixXd out = Eigen::MatrixXd::Constant(x.rows(), x.cols(), kNaN);
      for (Eigen::Index i = 0; i < x.cols(); ++i) {
        for (Eigen::Index d = w; d < x.rows(); ++d) {
          if (finite(x(d, i)) && finite(x(d - w, i))) {
            out(d, i) = x(d, i) - x(d - w, i);
          }
        }
      }
      return out;
    }
    case Op::TsRank: {
      const int w = window_from_child(tree);
      std::vector<double> vals;
      std::vector<double> ranks;
      return rolling(arg(0), w,
                     [&, w](const Eigen::MatrixXd& x, Eigen::Index d, Eigen::Index i) {
                       vals.clear();
                       for (int k = w - 1; k >= 0; --k) vals.push_back(x(d - k, i));
                       scaled_ranks(vals, ranks);
                       return ranks.back();
                     });
    }
    case Op::TsCorr: {
      const int w = window_from_child(tree);
      return rolling2(arg(0), arg(1), w,
                      [w](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                          Eigen::Index d, Eigen::Index i) {
                        double sx = 0, sy = 0, px = 0, py = 0;
                        for (int k = 0; k < w; ++k) {
                          sx += x(d - k, i);
                          sy += y(d - k, i);
                          px = std::max(px, std::abs(x(d - k, i)));
                          py = std::max(py, std::abs(y(d - k, i)));
                        }
                        const double mx = sx / w, my = sy / w;
                        double cxy = 0, vx = 0, vy = 0;
                        for (int k = 0; k < w; ++k) {
                          const double a = x(d - k, i) - mx;
                          const double b = y(d - k, i) - my;
                          cxy += a * b;
                          vx += a * a;
                          vy += b * b;
                        }
                        // Series whose spread is at rounding level (relative
                        // std below ~1e-12) count as constant: correlating
                        // against their float jitter is pure noise.
                        if (vx <= 1e-24 * w * px * px || vy <= 1e-24 * w * py * py) {
                          return kNaN;
                        }
                        return cxy / std::sqrt(vx * vy);
                      });
    }
    case Op::TsCov: {
      const int w = window_from_child(tree);
      return rolling2(arg(0), arg(1), w,
                      [w](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                          Eigen::Index d, Eigen::Index i) {
                        if (w < 2) return kNaN;
                        double sx = 0, sy = 0;
                        for (int k = 0; k < w; ++k) {
                          sx += x(d - k, i);
                          sy += y(d - k, i);
                        }
                        const double mx = sx / w, my = sy / w;
                        double cxy = 0;
                        for (int k = 0; k < w; ++k) {
                          cxy += (x(d - k, i) - mx) * (y(d - k, i) - my);
                        }
                        return cxy / (w - 1);
                      });
    }
    case Op::Start:
    case Op::End:
      break;
  }
  throw MissingFeature("operator " + std::string(op_name(op)) +
                       " cannot appear inside an expression tree");
}

Eigen::MatrixXd evaluate_full(const ExprTree& tree, const Dataset& ds,
                              EvalCache* cache) {
  if (tree.leaf) {
    const Operand& o = tree.operand;
    if (o.kind() == OperandKind::Scalar) {
      return Eigen::MatrixXd::Constant(ds.day_count(), ds.stock_count(),
                                       o.scalar_value());
    }
    if (o.kind() == OperandKind::Matrix) {
      if (!ds.has_feature(o.feature())) {
        throw MissingFeature("dataset has no feature '" + o.feature() + "'");
      }
      return ds.feature(o.feature());
    }
    throw MissingFeature("expression leaves must be scalars or features");
  }

  std::string key;
  if (cache != nullptr) {
    key = tree_to_string(tree);
    if (const Eigen::MatrixXd* hit = cache->find(key)) return *hit;
  }
  Eigen::MatrixXd result = evaluate_node(tree, ds, cache);
  if (cache != nullptr) cache->insert(key, result);
  return result;
}

}  // namespace

const Eigen::MatrixXd* EvalCache::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void EvalCache::insert(const std::string& key, Eigen::MatrixXd value) {
  if (entries_.size() >= max_entries_) entries_.clear();
  entries_.emplace(key, std::move(value));
}

Eigen::MatrixXd evaluate(const ExprTree& tree, const EvalContext& ctx) {
  Eigen::MatrixXd full = evaluate_full(tree, ctx.dataset, ctx.cache);
  if (ctx.day_range.begin == 0 && ctx.day_range.end == ctx.dataset.day_count()) {
    return full;
  }
  return full.middleRows(ctx.day_range.begin, ctx.day_range.size());
}

}  // namespace alphaforge
