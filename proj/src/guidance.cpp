#include "alphaforge/guidance.hpp"

#include <cmath>
#include <random>

namespace alphaforge {

namespace {

void he_init(Eigen::MatrixXd& w, std::mt19937& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(w.cols()));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = u(rng);
  }
}

}  // namespace

PolicyValueNet::PolicyValueNet(int input_dim, int hidden_dim, int action_count,
                               unsigned seed)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), action_count_(action_count) {
  std::mt19937 rng(seed);
  w1_.resize(hidden_dim_, input_dim_);
  w2_.resize(hidden_dim_, hidden_dim_);
  wp_.resize(action_count_, hidden_dim_);
  he_init(w1_, rng);
  he_init(w2_, rng);
  he_init(wp_, rng);
  b1_ = Eigen::VectorXd::Zero(hidden_dim_);
  b2_ = Eigen::VectorXd::Zero(hidden_dim_);
  bp_ = Eigen::VectorXd::Zero(action_count_);
  wv_.resize(hidden_dim_);
  {
    const double bound = std::sqrt(6.0 / static_cast<double>(hidden_dim_));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index i = 0; i < wv_.size(); ++i) wv_(i) = u(rng);
  }
  bv_ = 0.0;
}

struct PolicyValueNet::Forward {
  Eigen::MatrixXd h1, h2;       // post-ReLU activations, rows = samples
  Eigen::MatrixXd logits, probs;
  Eigen::VectorXd log_norm;     // log sum exp per row (shifted)
  Eigen::VectorXd row_max;
  Eigen::VectorXd v;            // tanh output
};

PolicyValueNet::Forward PolicyValueNet::forward(const Eigen::MatrixXd& X) const {
  Forward f;
  f.h1 = ((X * w1_.transpose()).rowwise() + b1_.transpose()).cwiseMax(0.0);
  f.h2 = ((f.h1 * w2_.transpose()).rowwise() + b2_.transpose()).cwiseMax(0.0);
  f.logits = (f.h2 * wp_.transpose()).rowwise() + bp_.transpose();
  f.row_max = f.logits.rowwise().maxCoeff();
  Eigen::MatrixXd shifted = f.logits.colwise() - f.row_max;
  Eigen::MatrixXd ex = shifted.array().exp().matrix();
  Eigen::VectorXd sums = ex.rowwise().sum();
  f.log_norm = sums.array().log().matrix();
  f.probs = ex.array().colwise() / sums.array();
  f.v = ((f.h2 * wv_).array() + bv_).tanh().matrix();
  return f;
}

GuidancePrediction PolicyValueNet::predict(const Eigen::VectorXd& encoding) {
  Forward f = forward(encoding.transpose());
  return {f.probs.row(0).transpose(), f.v(0)};
}

double PolicyValueNet::loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& P,
                            const Eigen::VectorXd& z) const {
  Forward f = forward(X);
  const auto B = static_cast<double>(X.rows());
  // Cross entropy with log-softmax: -sum pi * (logit - max - log_norm).
  Eigen::MatrixXd log_probs =
      (f.logits.colwise() - f.row_max).colwise() - f.log_norm;
  const double ce = -(P.array() * log_probs.array()).sum() / B;
  const double ve = (f.v - z).squaredNorm() / B;
  return ce + ve;
}

std::pair<double, Eigen::VectorXd> PolicyValueNet::loss_and_gradient(
    const Eigen::MatrixXd& X, const Eigen::MatrixXd& P,
    const Eigen::VectorXd& z) const {
  Forward f = forward(X);
  const auto Bn = static_cast<double>(X.rows());

  Eigen::MatrixXd log_probs =
      (f.logits.colwise() - f.row_max).colwise() - f.log_norm;
  const double ce = -(P.array() * log_probs.array()).sum() / Bn;
  const double ve = (f.v - z).squaredNorm() / Bn;

  Eigen::MatrixXd d_logits = (f.probs - P) / Bn;                       // B x A
  Eigen::VectorXd d_vpre =
      (2.0 * (f.v - z).array() * (1.0 - f.v.array().square()) / Bn).matrix();

  Eigen::MatrixXd d_wp = d_logits.transpose() * f.h2;                  // A x H
  Eigen::VectorXd d_bp = d_logits.colwise().sum().transpose();
  Eigen::VectorXd d_wv = f.h2.transpose() * d_vpre;
  const double d_bv = d_vpre.sum();

  Eigen::MatrixXd d_h2 = d_logits * wp_ + d_vpre * wv_.transpose();    // B x H
  d_h2 = (f.h2.array() > 0.0).select(d_h2, 0.0);
  Eigen::MatrixXd d_w2 = d_h2.transpose() * f.h1;
  Eigen::VectorXd d_b2 = d_h2.colwise().sum().transpose();

  Eigen::MatrixXd d_h1 = d_h2 * w2_;
  d_h1 = (f.h1.array() > 0.0).select(d_h1, 0.0);
  Eigen::MatrixXd d_w1 = d_h1.transpose() * X;
  Eigen::VectorXd d_b1 = d_h1.colwise().sum().transpose();

  Eigen::VectorXd grad(parameter_count());
  int off = 0;
  auto put_m = [&](const Eigen::MatrixXd& m) {
    grad.segment(off, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    off += static_cast<int>(m.size());
  };
  auto put_v = [&](const Eigen::VectorXd& v) {
    grad.segment(off, v.size()) = v;
    off += static_cast<int>(v.size());
  };
  put_m(d_w1);
  put_v(d_b1);
  put_m(d_w2);
  put_v(d_b2);
  put_m(d_wp);
  put_v(d_bp);
  put_v(d_wv);
  grad(off++) = d_bv;
  return {ce + ve, grad};
}

void PolicyValueNet::train(const Eigen::MatrixXd& X, const Eigen::MatrixXd& P,
                           const Eigen::VectorXd& z, double learning_rate) {
  auto [l, grad] = loss_and_gradient(X, P, z);
  (void)l;
  set_parameters(parameters() - learning_rate * grad);
}

int PolicyValueNet::parameter_count() const {
  return static_cast<int>(w1_.size() + b1_.size() + w2_.size() + b2_.size() +
                          wp_.size() + bp_.size() + wv_.size() + 1);
}

Eigen::VectorXd PolicyValueNet::parameters() const {
  Eigen::VectorXd flat(parameter_count());
  int off = 0;
  auto put_m = [&](const Eigen::MatrixXd& m) {
    flat.segment(off, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    off += static_cast<int>(m.size());
  };
  auto put_v = [&](const Eigen::VectorXd& v) {
    flat.segment(off, v.size()) = v;
    off += static_cast<int>(v.size());
  };
  put_m(w1_);
  put_v(b1_);
  put_m(w2_);
  put_v(b2_);
  put_m(wp_);
  put_v(bp_);
  put_v(wv_);
  flat(off++) = bv_;
  return flat;
}

void PolicyValueNet::set_parameters(const Eigen::VectorXd& flat) {
  int off = 0;
  auto take_m = [&](Eigen::MatrixXd& m) {
    m = Eigen::Map<const Eigen::MatrixXd>(flat.data() + off, m.rows(), m.cols());
    off += static_cast<int>(m.size());
  };
  auto take_v = [&](Eigen::VectorXd& v) {
    v = flat.segment(off, v.size());
    off += static_cast<int>(v.size());
  };
  take_m(w1_);
  take_v(b1_);
  take_m(w2_);
  take_v(b2_);
  take_m(wp_);
  take_v(bp_);
  take_v(wv_);
  bv_ = flat(off++);
}

}  // namespace alphaforge
