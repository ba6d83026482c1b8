#pragma once

#include <Eigen/Dense>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alphaforge/data.hpp"
#include "alphaforge/evaluator.hpp"
#include "alphaforge/metrics.hpp"
#include "alphaforge/program.hpp"

namespace alphaforge {

struct MdpConfig {
  double gamma = 0.99;  // discounts value targets; episode-length regularizer
  bool use_diversity_discount = true;
  bool abs_corr = false;
  // An alpha must be defined on at least this fraction of the evaluation
  // split's cells to score; sparser expressions rate 0. An IC averaged over
  // a handful of 3-stock days is sampling noise, not signal.
  double min_coverage = 0.5;
};

/// One construction state: the program so far plus the register file.
struct EnvState {
  AlphaProgram program;
  RegisterFileState registers;
  bool terminal = false;
};

/// Deterministic MDP over alpha-program construction. States are programs,
/// actions are instructions, and the reward for a step is the change in the
/// diversity-discounted score of the Reg0 expression evaluated on the
/// training split (0 for an empty Reg0), so episode returns telescope to the
/// final program's score.
///
/// Instances are cheap views over shared immutable inputs; the mined-set
/// reference must stay frozen while episodes are running.
class AlphaEnv {
 public:
  AlphaEnv(const Dataset& dataset, const OpsConfig& ops, const DimRules& rules,
           const ActionVocabulary& vocab, const MdpConfig& mdp,
           const MinedAlphaSet* mined, EvalCache* cache);

  EnvState reset() const;

  /// Dimension-filtered legal actions (the MDP's true action set).
  std::vector<Instruction> legal_actions(const EnvState& state) const;
  /// Structural legality only; used for pruning-ratio diagnostics.
  std::vector<Instruction> unfiltered_actions(const EnvState& state) const;

  /// Applies one legal action. Throws IllegalAction otherwise.
  std::pair<EnvState, double> step(const EnvState& state,
                                   const Instruction& action) const;

  /// The transition alone, without evaluating the reward; used by the
  /// search to build tree nodes cheaply.
  EnvState apply_action(const EnvState& state, const Instruction& action) const;

  /// Score of the state's Reg0 expression on the training split
  /// ((1 - MaxCorr) * IC against the frozen mined set); 0 when Reg0 is empty.
  double state_perf(const EnvState& state) const;

  /// Fixed-length encoding: per instruction slot, one-hot operator plus
  /// three one-hot operand blocks; all zeros for the empty program.
  Eigen::VectorXd encode(const EnvState& state) const;
  int encoding_size() const;

  /// Drop memoized scores after the mined set changes between episodes.
  void clear_perf_cache() const;

  const OpsConfig& ops() const { return ops_; }
  const ActionVocabulary& vocabulary() const { return vocab_; }
  const Dataset& dataset() const { return dataset_; }
  const MdpConfig& mdp() const { return mdp_; }

 private:
  bool is_terminal(const RegisterFileState& rf) const;
  bool action_legal(const EnvState& state, const Instruction& action) const;

  const Dataset& dataset_;
  const OpsConfig& ops_;
  const DimRules& rules_;
  const ActionVocabulary& vocab_;
  MdpConfig mdp_;
  const MinedAlphaSet* mined_;
  EvalCache* cache_;
  Eigen::MatrixXd target_train_;
  mutable std::unordered_map<std::string, double> perf_cache_;
};

}  // namespace alphaforge
