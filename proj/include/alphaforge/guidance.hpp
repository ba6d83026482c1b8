#pragma once

#include <Eigen/Dense>
#include <utility>

namespace alphaforge {

struct GuidancePrediction {
  Eigen::VectorXd priors;  // distribution over the global action vocabulary
  double value = 0.0;
};

/// Prior-policy and value predictor steering the tree search. predict()
/// returns a full-vocabulary distribution; the search masks it to legal
/// actions and renormalizes.
class GuidanceModel {
 public:
  virtual ~GuidanceModel() = default;
  virtual GuidancePrediction predict(const Eigen::VectorXd& encoding) = 0;
  /// One SGD step on a batch: rows of `encodings` with matching rows of
  /// `policy_targets` (visit distributions) and `value_targets` (returns).
  virtual void train(const Eigen::MatrixXd& encodings,
                     const Eigen::MatrixXd& policy_targets,
                     const Eigen::VectorXd& value_targets, double learning_rate) = 0;
  virtual bool trainable() const { return false; }
};

/// Uniform priors and zero value; runs the full pipeline with no learning.
class UniformGuidance final : public GuidanceModel {
 public:
  explicit UniformGuidance(int action_count) : action_count_(action_count) {}
  GuidancePrediction predict(const Eigen::VectorXd&) override {
    return {Eigen::VectorXd::Constant(action_count_, 1.0 / action_count_), 0.0};
  }
  void train(const Eigen::MatrixXd&, const Eigen::MatrixXd&, const Eigen::VectorXd&,
             double) override {}

 private:
  int action_count_;
};

/// Two-hidden-layer ReLU network with a softmax policy head over the action
/// vocabulary and a tanh-bounded scalar value head, trained by plain SGD on
/// cross-entropy plus squared error. Weights are seeded deterministically.
class PolicyValueNet final : public GuidanceModel {
 public:
  PolicyValueNet(int input_dim, int hidden_dim, int action_count, unsigned seed);

  GuidancePrediction predict(const Eigen::VectorXd& encoding) override;
  void train(const Eigen::MatrixXd& encodings, const Eigen::MatrixXd& policy_targets,
             const Eigen::VectorXd& value_targets, double learning_rate) override;
  bool trainable() const override { return true; }

  /// Mean batch loss: cross-entropy(policy) + squared error(value).
  double loss(const Eigen::MatrixXd& encodings, const Eigen::MatrixXd& policy_targets,
              const Eigen::VectorXd& value_targets) const;
  /// Loss plus analytic gradient in flat-parameter order; no update.
  std::pair<double, Eigen::VectorXd> loss_and_gradient(
      const Eigen::MatrixXd& encodings, const Eigen::MatrixXd& policy_targets,
      const Eigen::VectorXd& value_targets) const;

  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
  int parameter_count() const;

  int input_dim() const { return input_dim_; }
  int action_count() const { return action_count_; }

 private:
  struct Forward;
  Forward forward(const Eigen::MatrixXd& X) const;

  int input_dim_;
  int hidden_dim_;
  int action_count_;
  Eigen::MatrixXd w1_, w2_, wp_;  // (out x in) layouts
  Eigen::VectorXd b1_, b2_, bp_, wv_;
  double bv_ = 0.0;
};

}  // namespace alphaforge
