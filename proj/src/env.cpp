#include "alphaforge/env.hpp"

#include "alphaforge/errors.hpp"

namespace alphaforge {

AlphaEnv::AlphaEnv(const Dataset& dataset, const OpsConfig& ops, const DimRules& rules,
                   const ActionVocabulary& vocab, const MdpConfig& mdp,
                   const MinedAlphaSet* mined, EvalCache* cache)
    : dataset_(dataset),
      ops_(ops),
      rules_(rules),
      vocab_(vocab),
      mdp_(mdp),
      mined_(mined),
      cache_(cache) {
  target_train_ =
      dataset_.target.middleRows(dataset_.splits.train.begin, dataset_.splits.train.size());
}

EnvState AlphaEnv::reset() const {
  EnvState s;
  s.registers = RegisterFileState::initial(ops_);
  s.terminal = false;
  return s;
}

bool AlphaEnv::is_terminal(const RegisterFileState& rf) const {
  if (rf.ended()) return true;
  if (rf.instruction_count() >= ops_.max_length) return true;
  if (rf.instruction_count() == ops_.max_length - 1) {
    // Only End may follow; terminal when End is not legal here.
    if (!rf.started() || !rf.slot(0).occupied()) return true;
    for (int i = 1; i < rf.register_count(); ++i) {
      if (rf.slot(i).occupied()) return true;
    }
  }
  return false;
}

std::vector<Instruction> AlphaEnv::legal_actions(const EnvState& state) const {
  if (state.terminal) return {};
  return vocab_.legal_actions(state.registers, &rules_);
}

std::vector<Instruction> AlphaEnv::unfiltered_actions(const EnvState& state) const {
  if (state.terminal) return {};
  return vocab_.legal_actions(state.registers, nullptr);
}

bool AlphaEnv::action_legal(const EnvState& state, const Instruction& action) const {
  if (state.terminal) return false;
  return action_allowed(state.registers, action, ops_, &rules_);
}

EnvState AlphaEnv::apply_action(const EnvState& state,
                                const Instruction& action) const {
  if (!action_legal(state, action)) {
    throw IllegalAction("action '" + action.to_string() +
                        "' is not legal in the current state");
  }
  EnvState next;
  next.program = state.program;
  next.program.push_back(action);
  next.registers = apply_instruction(state.registers, action, ops_, rules_);
  next.terminal = is_terminal(next.registers);
  return next;
}

std::pair<EnvState, double> AlphaEnv::step(const EnvState& state,
                                           const Instruction& action) const {
  EnvState next = apply_action(state, action);
  const double reward = state_perf(next) - state_perf(state);
  return {std::move(next), reward};
}

double AlphaEnv::state_perf(const EnvState& state) const {
  const auto& slot = state.registers.slot(0);
  if (!slot.occupied()) return 0.0;

  const std::string key = tree_to_string(slot.tree);
  auto it = perf_cache_.find(key);
  if (it != perf_cache_.end()) return it->second;

  EvalContext ctx{dataset_, dataset_.splits.train, cache_};
  const Eigen::MatrixXd z = evaluate(slot.tree, ctx);
  double score = 0.0;
  if (finite_fraction(z) >= mdp_.min_coverage) {
    score = perf(z, target_train_, *mined_, mdp_.abs_corr,
                 mdp_.use_diversity_discount);
  }
  perf_cache_.emplace(key, score);
  return score;
}

Eigen::VectorXd AlphaEnv::encode(const EnvState& state) const {
  const int op_block = kOpCount;
  const int operand_block = vocab_.operand_vocabulary_size();
  const int slot_size = op_block + 3 * operand_block;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ops_.max_length * slot_size);
  const auto& instrs = state.program.instructions();
  for (int t = 0; t < static_cast<int>(instrs.size()) && t < ops_.max_length; ++t) {
    const int base = t * slot_size;
    out(base + static_cast<int>(instrs[t].op)) = 1.0;
    for (int k = 0; k < 3; ++k) {
      const int idx = vocab_.operand_index(instrs[t].operands[k]);
      if (idx >= 0) out(base + op_block + k * operand_block + idx) = 1.0;
    }
  }
  return out;
}

int AlphaEnv::encoding_size() const {
  return ops_.max_length * (kOpCount + 3 * vocab_.operand_vocabulary_size());
}

void AlphaEnv::clear_perf_cache() const { perf_cache_.clear(); }

}  // namespace alphaforge
