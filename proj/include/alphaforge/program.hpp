#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "alphaforge/dimensions.hpp"
#include "alphaforge/operators.hpp"

namespace alphaforge {

enum class OperandKind : std::uint8_t { Null = 0, Scalar, Matrix, Register };

/// A single instruction operand: Null placeholder, scalar constant,
/// matrix feature, or register reference. Immutable value type.
class Operand {
 public:
  Operand() = default;  // Null
  static Operand null() { return Operand(); }
  static Operand scalar(double v) {
    Operand o;
    o.kind_ = OperandKind::Scalar;
    o.scalar_ = v;
    return o;
  }
  static Operand matrix(std::string feature) {
    Operand o;
    o.kind_ = OperandKind::Matrix;
    o.feature_ = std::move(feature);
    return o;
  }
  static Operand reg(int index) {
    Operand o;
    o.kind_ = OperandKind::Register;
    o.reg_ = index;
    return o;
  }

  OperandKind kind() const { return kind_; }
  bool is_null() const { return kind_ == OperandKind::Null; }
  double scalar_value() const { return scalar_; }
  const std::string& feature() const { return feature_; }
  int register_index() const { return reg_; }

  bool operator==(const Operand& o) const;
  bool operator!=(const Operand& o) const { return !(*this == o); }

  /// Serialization token: "Null", "close", "Reg0", "0.5", ...
  std::string token() const;
  /// Inverse of token(); feature names are resolved against `features`.
  /// Throws ParseError on an unrecognizable token.
  static Operand from_token(const std::string& token,
                            const std::vector<std::string>& features);

 private:
  OperandKind kind_ = OperandKind::Null;
  double scalar_ = 0.0;
  std::string feature_;
  int reg_ = -1;
};

/// 4-tuple instruction: operator plus three operand slots; slots beyond the
/// operator arity hold Null.
struct Instruction {
  Op op = Op::Start;
  std::array<Operand, 3> operands;

  Instruction() = default;
  Instruction(Op o, Operand a = Operand::null(), Operand b = Operand::null(),
              Operand c = Operand::null())
      : op(o), operands{std::move(a), std::move(b), std::move(c)} {}

  bool operator==(const Instruction& other) const;
  std::string to_string() const;  // "Sub,close,open,Null"
};

/// Ordered instruction list with a configured length cap.
class AlphaProgram {
 public:
  AlphaProgram() = default;
  explicit AlphaProgram(std::vector<Instruction> instructions)
      : instructions_(std::move(instructions)) {}

  const std::vector<Instruction>& instructions() const { return instructions_; }
  int size() const { return static_cast<int>(instructions_.size()); }
  bool empty() const { return instructions_.empty(); }
  const Instruction& back() const { return instructions_.back(); }
  void push_back(Instruction instr) { instructions_.push_back(std::move(instr)); }

  bool operator==(const AlphaProgram& o) const {
    return instructions_ == o.instructions_;
  }

 private:
  std::vector<Instruction> instructions_;
};

struct ExprTree;
using ExprTreePtr = std::shared_ptr<const ExprTree>;

/// Immutable expression tree. Leaves are Scalar or Matrix operands; internal
/// nodes apply an operator to child subtrees (windows appear as scalar
/// leaves in the operator's window slot).
struct ExprTree {
  bool leaf = true;
  Operand operand;            // valid when leaf
  Op op = Op::Start;          // valid when !leaf
  std::vector<ExprTreePtr> children;

  static ExprTreePtr make_leaf(Operand operand);
  static ExprTreePtr make_node(Op op, std::vector<ExprTreePtr> children);
};

/// Canonical prefix-form text of a tree, e.g. "Div(Sub(close,open),Sub(high,low))".
std::string tree_to_string(const ExprTree& tree);
inline std::string tree_to_string(const ExprTreePtr& t) { return tree_to_string(*t); }

/// Parses an expression in the tree_to_string form, plus infix sugar for
/// + - * / with parentheses, e.g. "(close-open)/(high-low)".
/// Throws ParseError.
ExprTreePtr parse_expression(const std::string& text,
                             const std::vector<std::string>& features);

/// Instruction-set configuration: the operand vocabulary and program length
/// cap that define the action space.
struct OpsConfig {
  std::vector<std::string> features = {"open",   "close", "high",
                                       "low",    "volume", "vwap"};
  std::vector<double> constant_pool = {0, 0.1, 0.5, 1, 3, 5, 10, 15, 20, 30, 60};
  int register_count = 2;
  int max_length = 16;

  static OpsConfig defaults() { return OpsConfig{}; }
  /// Positive integers from the constant pool, used as rolling windows.
  std::vector<double> window_pool() const;
  int feature_index(const std::string& name) const;  // -1 if absent
  int scalar_index(double v) const;                  // -1 if absent
};

/// One register slot during program construction: the expression tree held
/// there plus its dimension (nullopt when the tree is dimensionally illegal,
/// which only arises when the dimension filter is bypassed).
struct RegisterSlot {
  ExprTreePtr tree;
  std::optional<Dimension> dim;
  bool occupied() const { return tree != nullptr; }
};

/// Register occupancy plus program-progress flags; the state threaded
/// through validate/apply during construction.
class RegisterFileState {
 public:
  RegisterFileState() = default;
  static RegisterFileState initial(const OpsConfig& cfg);

  const std::vector<RegisterSlot>& slots() const { return slots_; }
  const RegisterSlot& slot(int i) const { return slots_[i]; }
  int register_count() const { return static_cast<int>(slots_.size()); }
  int occupied_count() const;
  bool started() const { return started_; }
  bool ended() const { return ended_; }
  int instruction_count() const { return instruction_count_; }

  friend RegisterFileState apply_instruction(const RegisterFileState& state,
                                             const Instruction& instr,
                                             const OpsConfig& cfg,
                                             const DimRules& rules);

 private:
  std::vector<RegisterSlot> slots_;
  int instruction_count_ = 0;
  bool started_ = false;
  bool ended_ = false;
};

/// Structural validity: arity/Null alignment, operand slot typing (windows
/// are positive integer scalars; series slots take matrices or registers;
/// arithmetic slots additionally take scalars, but not scalars everywhere),
/// register reads of occupied slots only, a free slot for register-less
/// results, Start only on an empty program, End only with Reg0 holding the
/// sole live value. Total predicate; never throws.
bool validate_instruction(const RegisterFileState& state, const Instruction& instr,
                          const OpsConfig& cfg);

/// Executes one instruction: the result tree goes to the first free register
/// when no register operand is read, overwrites the register of a
/// single-register read, and for a multi-register read lands in the lowest
/// read register while the other read registers are emptied (occupied slots
/// are then compacted downward). Throws InvalidInstruction when
/// validate_instruction fails.
RegisterFileState apply_instruction(const RegisterFileState& state,
                                    const Instruction& instr, const OpsConfig& cfg,
                                    const DimRules& rules);

/// Executes the whole program and returns the Reg0 tree. Throws
/// InvalidInstruction on an invalid step and EmptyProgram when Reg0 was
/// never written.
ExprTreePtr compile(const AlphaProgram& program, const OpsConfig& cfg,
                    const DimRules& rules);

/// One instruction per line, comma-separated tokens: "Sub,close,open,Null".
std::string serialize(const AlphaProgram& program);
/// Inverse of serialize. Throws ParseError with the offending line number.
AlphaProgram parse(const std::string& text, const OpsConfig& cfg);

/// Structural-plus-dimensional legality of one candidate instruction in
/// `state` (dimension check skipped when `rules` is null).
bool action_allowed(const RegisterFileState& state, const Instruction& instr,
                    const OpsConfig& cfg, const DimRules* rules);

/// All instructions legal from `state`: structurally valid, within the
/// length budget (a non-End instruction must leave room for End), and, when
/// `rules` is non-null, dimensionally legal. Deterministic order: operator
/// id, then operand ids.
std::vector<Instruction> enumerate_actions(const RegisterFileState& state,
                                           const OpsConfig& cfg,
                                           const DimRules* rules);

/// The global, state-independent action vocabulary: every instruction that
/// can ever be structurally legal under `cfg`, in enumeration order. Backs
/// the policy head and the visit-distribution targets.
class ActionVocabulary {
 public:
  explicit ActionVocabulary(const OpsConfig& cfg);

  int size() const { return static_cast<int>(actions_.size()); }
  const Instruction& action(int index) const { return actions_[index]; }
  const std::vector<Instruction>& actions() const { return actions_; }
  /// -1 when the instruction is outside the vocabulary.
  int index_of(const Instruction& instr) const;

  /// Operand token index (Null, then pool scalars, features, registers);
  /// -1 for operands outside the configured vocabulary.
  int operand_index(const Operand& operand) const;
  int operand_vocabulary_size() const { return operand_vocab_size_; }

  /// enumerate_actions over the prebuilt candidate list; same output,
  /// no per-call candidate construction.
  std::vector<Instruction> legal_actions(const RegisterFileState& state,
                                         const DimRules* rules) const;

 private:
  std::uint64_t instruction_key(const Instruction& instr) const;

  const OpsConfig cfg_;
  std::vector<Instruction> actions_;
  std::unordered_map<std::uint64_t, int> index_;
  int operand_vocab_size_ = 0;
};

/// 64-bit FNV-1a over the canonical tree text; stable across runs.
std::uint64_t fingerprint(const ExprTree& tree);
inline std::uint64_t fingerprint(const ExprTreePtr& t) { return fingerprint(*t); }

/// Dimension of a whole tree under `rules`; nullopt if any node is illegal.
/// Used for post-hoc full-tree checks; incremental construction tracks
/// dimensions per register instead.
std::optional<Dimension> tree_dimension(const ExprTree& tree, const DimRules& rules);

}  // namespace alphaforge
