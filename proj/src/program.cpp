#include "alphaforge/program.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "alphaforge/errors.hpp"

namespace alphaforge {

std::optional<Op> op_from_name(std::string_view name) {
  for (const auto& info : kOpTable) {
    if (info.name == name) return info.op;
  }
  return std::nullopt;
}

namespace {

std::string format_scalar(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  if (std::strtod(buf, nullptr) == v) return buf;
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_positive_integer(double v) {
  return v > 0 && std::isfinite(v) && v == std::floor(v) && v <= 1e9;
}

}  // namespace

bool Operand::operator==(const Operand& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case OperandKind::Null:
      return true;
    case OperandKind::Scalar:
      return scalar_ == o.scalar_;
    case OperandKind::Matrix:
      return feature_ == o.feature_;
    case OperandKind::Register:
      return reg_ == o.reg_;
  }
  return false;
}

std::string Operand::token() const {
  switch (kind_) {
    case OperandKind::Null:
      return "Null";
    case OperandKind::Scalar:
      return format_scalar(scalar_);
    case OperandKind::Matrix:
      return feature_;
    case OperandKind::Register:
      return "Reg" + std::to_string(reg_);
  }
  return "Null";
}

Operand Operand::from_token(const std::string& token,
                            const std::vector<std::string>& features) {
  if (token == "Null") return Operand::null();
  if (token.rfind("Reg", 0) == 0 && token.size() > 3) {
    bool digits = std::all_of(token.begin() + 3, token.end(),
                              [](unsigned char c) { return std::isdigit(c); });
    if (digits) return Operand::reg(std::stoi(token.substr(3)));
  }
  if (std::find(features.begin(), features.end(), token) != features.end()) {
    return Operand::matrix(token);
  }
  const char* begin = token.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin && *end == '\0') return Operand::scalar(v);
  throw ParseError("unrecognized operand token '" + token + "'");
}

bool Instruction::operator==(const Instruction& other) const {
  return op == other.op && operands == other.operands;
}

std::string Instruction::to_string() const {
  std::string s{op_name(op)};
  for (const auto& o : operands) {
    s += ',';
    s += o.token();
  }
  return s;
}

ExprTreePtr ExprTree::make_leaf(Operand operand) {
  auto node = std::make_shared<ExprTree>();
  node->leaf = true;
  node->operand = std::move(operand);
  return node;
}

ExprTreePtr ExprTree::make_node(Op op, std::vector<ExprTreePtr> children) {
  auto node = std::make_shared<ExprTree>();
  node->leaf = false;
  node->op = op;
  node->children = std::move(children);
  return node;
}

std::string tree_to_string(const ExprTree& tree) {
  if (tree.leaf) return tree.operand.token();
  std::string s{op_name(tree.op)};
  s += '(';
  for (std::size_t i = 0; i < tree.children.size(); ++i) {
    if (i) s += ',';
    s += tree_to_string(*tree.children[i]);
  }
  s += ')';
  return s;
}

// ---------------------------------------------------------------------------
// Expression parsing (canonical prefix calls plus infix + - * / sugar)
// ---------------------------------------------------------------------------

namespace {

struct ExprParser {
  const std::string& text;
  const std::vector<std::string>& features;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError("expression: " + msg + " at position " + std::to_string(pos));
  }

  ExprTreePtr parse_expr() {
    auto lhs = parse_term();
    while (true) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos;
        auto rhs = parse_term();
        lhs = ExprTree::make_node(c == '+' ? Op::Add : Op::Sub, {lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  ExprTreePtr parse_term() {
    auto lhs = parse_factor();
    while (true) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++pos;
        auto rhs = parse_factor();
        lhs = ExprTree::make_node(c == '*' ? Op::Mul : Op::Div, {lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  ExprTreePtr parse_factor() {
    char c = peek();
    if (c == '(') {
      ++pos;
      auto inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_identifier();
    }
    fail("unexpected character");
  }

  ExprTreePtr parse_number() {
    skip_ws();
    const char* begin = text.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos += static_cast<std::size_t>(end - begin);
    return ExprTree::make_leaf(Operand::scalar(v));
  }

  ExprTreePtr parse_identifier() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
    }
    std::string name = text.substr(start, pos - start);
    if (peek() == '(') {
      auto op = op_from_name(name);
      if (!op) fail("unknown operator '" + name + "'");
      ++pos;
      std::vector<ExprTreePtr> args;
      if (peek() != ')') {
        args.push_back(parse_expr());
        while (consume(',')) args.push_back(parse_expr());
      }
      if (!consume(')')) fail("expected ')'");
      if (static_cast<int>(args.size()) != op_arity(*op)) {
        fail("operator '" + name + "' expects " + std::to_string(op_arity(*op)) +
             " arguments");
      }
      return ExprTree::make_node(*op, std::move(args));
    }
    if (std::find(features.begin(), features.end(), name) == features.end()) {
      fail("unknown identifier '" + name + "'");
    }
    return ExprTree::make_leaf(Operand::matrix(name));
  }
};

}  // namespace

ExprTreePtr parse_expression(const std::string& text,
                             const std::vector<std::string>& features) {
  ExprParser p{text, features};
  auto tree = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return tree;
}

// ---------------------------------------------------------------------------
// OpsConfig
// ---------------------------------------------------------------------------

std::vector<double> OpsConfig::window_pool() const {
  std::vector<double> out;
  for (double v : constant_pool) {
    if (is_positive_integer(v)) out.push_back(v);
  }
  return out;
}

int OpsConfig::feature_index(const std::string& name) const {
  auto it = std::find(features.begin(), features.end(), name);
  return it == features.end() ? -1 : static_cast<int>(it - features.begin());
}

int OpsConfig::scalar_index(double v) const {
  auto it = std::find(constant_pool.begin(), constant_pool.end(), v);
  return it == constant_pool.end() ? -1 : static_cast<int>(it - constant_pool.begin());
}

// ---------------------------------------------------------------------------
// Register semantics
// ---------------------------------------------------------------------------

RegisterFileState RegisterFileState::initial(const OpsConfig& cfg) {
  RegisterFileState s;
  s.slots_.resize(cfg.register_count);
  return s;
}

int RegisterFileState::occupied_count() const {
  int n = 0;
  for (const auto& s : slots_) n += s.occupied() ? 1 : 0;
  return n;
}

namespace {

// Distinct register indices read by the instruction, ascending.
struct RegisterReads {
  std::array<int, 3> reg{};
  int count = 0;
};

RegisterReads registers_read(const Instruction& instr) {
  RegisterReads reads;
  for (const auto& o : instr.operands) {
    if (o.kind() != OperandKind::Register) continue;
    const int r = o.register_index();
    bool seen = false;
    for (int i = 0; i < reads.count; ++i) {
      if (reads.reg[i] == r) seen = true;
    }
    if (!seen) reads.reg[reads.count++] = r;
  }
  std::sort(reads.reg.begin(), reads.reg.begin() + reads.count);
  return reads;
}

enum class SlotType { None, Series, Window, Arith };

// Operand typing per slot; slots beyond arity are None (must be Null).
std::array<SlotType, 3> slot_types(Op op) {
  const auto& info = op_info(op);
  std::array<SlotType, 3> st{SlotType::None, SlotType::None, SlotType::None};
  for (int i = 0; i < info.arity; ++i) {
    if (i == info.window_slot) {
      st[i] = SlotType::Window;
    } else if (op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div) {
      st[i] = SlotType::Arith;
    } else {
      st[i] = SlotType::Series;
    }
  }
  return st;
}

bool operand_matches_slot(const Operand& o, SlotType st) {
  switch (st) {
    case SlotType::None:
      return o.is_null();
    case SlotType::Window:
      return o.kind() == OperandKind::Scalar && is_positive_integer(o.scalar_value());
    case SlotType::Series:
      return o.kind() == OperandKind::Matrix || o.kind() == OperandKind::Register;
    case SlotType::Arith:
      return o.kind() == OperandKind::Matrix || o.kind() == OperandKind::Register ||
             o.kind() == OperandKind::Scalar;
  }
  return false;
}

bool structurally_valid(const Instruction& instr, const OpsConfig& cfg) {
  const auto st = slot_types(instr.op);
  int scalar_count = 0;
  int data_slots = 0;
  for (int i = 0; i < 3; ++i) {
    const Operand& o = instr.operands[i];
    if (!operand_matches_slot(o, st[i])) return false;
    if (st[i] == SlotType::Arith || st[i] == SlotType::Series) {
      ++data_slots;
      if (o.kind() == OperandKind::Scalar) ++scalar_count;
    }
    if (o.kind() == OperandKind::Matrix && cfg.feature_index(o.feature()) < 0) {
      return false;
    }
    if (o.kind() == OperandKind::Register &&
        (o.register_index() < 0 || o.register_index() >= cfg.register_count)) {
      return false;
    }
  }
  // A constant-only expression carries no market information.
  if (data_slots > 0 && scalar_count == data_slots) return false;
  return true;
}

}  // namespace

bool validate_instruction(const RegisterFileState& state, const Instruction& instr,
                          const OpsConfig& cfg) {
  if (state.ended()) return false;
  if (!structurally_valid(instr, cfg)) return false;

  const int len = state.instruction_count();
  if (instr.op == Op::Start) {
    // Start opens a program; everything else needs one already open.
    return !state.started() && len == 0 && len + 1 <= cfg.max_length - 1;
  }
  if (!state.started()) return false;

  if (instr.op == Op::End) {
    if (len + 1 > cfg.max_length) return false;
    if (!state.slot(0).occupied()) return false;
    for (int i = 1; i < state.register_count(); ++i) {
      if (state.slot(i).occupied()) return false;  // no half-built leftovers
    }
    return true;
  }

  // Non-End instructions must leave room for a final End.
  if (len + 1 > cfg.max_length - 1) return false;

  const auto reads = registers_read(instr);
  for (int i = 0; i < reads.count; ++i) {
    const int r = reads.reg[i];
    if (r >= state.register_count() || !state.slot(r).occupied()) return false;
  }
  if (reads.count == 0) {
    if (state.occupied_count() >= state.register_count()) return false;  // no free slot
  }
  return true;
}

RegisterFileState apply_instruction(const RegisterFileState& state,
                                    const Instruction& instr, const OpsConfig& cfg,
                                    const DimRules& rules) {
  if (!validate_instruction(state, instr, cfg)) {
    throw InvalidInstruction("instruction '" + instr.to_string() +
                             "' is invalid in the current state");
  }
  RegisterFileState next = state;
  next.instruction_count_ += 1;

  if (instr.op == Op::Start) {
    next.started_ = true;
    return next;
  }
  if (instr.op == Op::End) {
    next.ended_ = true;
    return next;
  }

  // Operand trees and dimensions, in slot order.
  std::vector<ExprTreePtr> children;
  std::vector<std::optional<Dimension>> arg_dims;
  for (int i = 0; i < op_arity(instr.op); ++i) {
    const Operand& o = instr.operands[i];
    switch (o.kind()) {
      case OperandKind::Scalar:
        children.push_back(ExprTree::make_leaf(o));
        arg_dims.push_back(Dimension::dimensionless());
        break;
      case OperandKind::Matrix:
        children.push_back(ExprTree::make_leaf(o));
        arg_dims.push_back(rules.has_feature(o.feature())
                               ? std::optional<Dimension>(rules.feature_dimension(o.feature()))
                               : std::nullopt);
        break;
      case OperandKind::Register:
        children.push_back(state.slot(o.register_index()).tree);
        arg_dims.push_back(state.slot(o.register_index()).dim);
        break;
      case OperandKind::Null:
        break;
    }
  }

  std::optional<Dimension> result_dim;
  if (std::all_of(arg_dims.begin(), arg_dims.end(),
                  [](const auto& d) { return d.has_value(); })) {
    std::vector<Dimension> dims;
    for (const auto& d : arg_dims) dims.push_back(*d);
    result_dim = rules.result_dimension(instr.op, dims);
  }

  ExprTreePtr result = ExprTree::make_node(instr.op, std::move(children));

  const auto reads = registers_read(instr);
  if (reads.count == 0) {
    for (auto& slot : next.slots_) {
      if (!slot.occupied()) {
        slot = RegisterSlot{result, result_dim};
        break;
      }
    }
  } else if (reads.count == 1) {
    next.slots_[reads.reg[0]] = RegisterSlot{result, result_dim};
  } else {
    next.slots_[reads.reg[0]] = RegisterSlot{result, result_dim};
    for (int i = 1; i < reads.count; ++i) {
      next.slots_[reads.reg[i]] = RegisterSlot{};
    }
    // Keep occupied slots a prefix.
    std::stable_partition(next.slots_.begin(), next.slots_.end(),
                          [](const RegisterSlot& s) { return s.occupied(); });
  }
  return next;
}

ExprTreePtr compile(const AlphaProgram& program, const OpsConfig& cfg,
                    const DimRules& rules) {
  RegisterFileState state = RegisterFileState::initial(cfg);
  for (const auto& instr : program.instructions()) {
    state = apply_instruction(state, instr, cfg, rules);
  }
  if (!state.slot(0).occupied()) {
    throw EmptyProgram("program never wrote Reg0");
  }
  return state.slot(0).tree;
}

std::string serialize(const AlphaProgram& program) {
  std::string out;
  for (const auto& instr : program.instructions()) {
    out += instr.to_string();
    out += '\n';
  }
  return out;
}

AlphaProgram parse(const std::string& text, const OpsConfig& cfg) {
  std::vector<Instruction> instructions;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Trim.
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);

    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (true) {
      auto comma = line.find(',', pos);
      tokens.push_back(line.substr(pos, comma == std::string::npos
                                            ? std::string::npos
                                            : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (tokens.size() != 4) {
      throw ParseError("expected 4 comma-separated tokens", line_no);
    }
    auto op = op_from_name(tokens[0]);
    if (!op) throw ParseError("unknown operator '" + tokens[0] + "'", line_no);
    Instruction instr;
    instr.op = *op;
    try {
      for (int i = 0; i < 3; ++i) {
        instr.operands[i] = Operand::from_token(tokens[i + 1], cfg.features);
      }
    } catch (const ParseError& err) {
      throw ParseError(err.what(), line_no);
    }
    instructions.push_back(std::move(instr));
  }
  if (instructions.empty()) {
    throw ParseError("no instructions in program text", 1);
  }
  return AlphaProgram(std::move(instructions));
}

// ---------------------------------------------------------------------------
// Action enumeration and the global vocabulary
// ---------------------------------------------------------------------------

namespace {

// Candidate operands for one slot, in operand-id order
// (pool scalars, then features, then registers).
std::vector<Operand> slot_candidates(SlotType st, const OpsConfig& cfg) {
  std::vector<Operand> out;
  switch (st) {
    case SlotType::None:
      out.push_back(Operand::null());
      break;
    case SlotType::Window:
      for (double w : cfg.window_pool()) out.push_back(Operand::scalar(w));
      break;
    case SlotType::Arith:
      for (double v : cfg.constant_pool) out.push_back(Operand::scalar(v));
      [[fallthrough]];
    case SlotType::Series:
      for (const auto& f : cfg.features) out.push_back(Operand::matrix(f));
      for (int r = 0; r < cfg.register_count; ++r) out.push_back(Operand::reg(r));
      break;
  }
  return out;
}

template <typename Fn>
void for_each_candidate(const OpsConfig& cfg, Fn&& fn) {
  for (const auto& info : kOpTable) {
    const auto st = slot_types(info.op);
    const auto c0 = slot_candidates(st[0], cfg);
    const auto c1 = slot_candidates(st[1], cfg);
    const auto c2 = slot_candidates(st[2], cfg);
    for (const auto& a : c0) {
      for (const auto& b : c1) {
        for (const auto& c : c2) {
          Instruction instr(info.op, a, b, c);
          if (!structurally_valid(instr, cfg)) continue;  // drops all-scalar combos
          fn(instr);
        }
      }
    }
  }
}

}  // namespace

bool action_allowed(const RegisterFileState& state, const Instruction& instr,
                    const OpsConfig& cfg, const DimRules* rules) {
  if (!validate_instruction(state, instr, cfg)) return false;
  if (rules == nullptr || is_indicator(instr.op)) return true;
  Dimension dims[3];
  const int arity = op_arity(instr.op);
  for (int i = 0; i < arity; ++i) {
    const Operand& o = instr.operands[i];
    if (o.kind() == OperandKind::Scalar) {
      dims[i] = Dimension::dimensionless();
    } else if (o.kind() == OperandKind::Matrix) {
      if (!rules->has_feature(o.feature())) return false;
      dims[i] = rules->feature_dimension(o.feature());
    } else {
      const auto& slot = state.slot(o.register_index());
      if (!slot.dim.has_value()) return false;
      dims[i] = *slot.dim;
    }
  }
  return rules
      ->result_dimension(instr.op,
                         std::span<const Dimension>(dims, static_cast<std::size_t>(arity)))
      .has_value();
}

std::vector<Instruction> enumerate_actions(const RegisterFileState& state,
                                           const OpsConfig& cfg,
                                           const DimRules* rules) {
  std::vector<Instruction> out;
  if (state.ended()) return out;
  for_each_candidate(cfg, [&](const Instruction& instr) {
    if (action_allowed(state, instr, cfg, rules)) out.push_back(instr);
  });
  return out;
}

std::vector<Instruction> ActionVocabulary::legal_actions(
    const RegisterFileState& state, const DimRules* rules) const {
  std::vector<Instruction> out;
  if (state.ended()) return out;
  for (const Instruction& instr : actions_) {
    if (action_allowed(state, instr, cfg_, rules)) out.push_back(instr);
  }
  return out;
}

ActionVocabulary::ActionVocabulary(const OpsConfig& cfg) : cfg_(cfg) {
  operand_vocab_size_ = 1 + static_cast<int>(cfg.constant_pool.size()) +
                        static_cast<int>(cfg.features.size()) + cfg.register_count;
  for_each_candidate(cfg_, [&](const Instruction& instr) {
    index_.emplace(instruction_key(instr), static_cast<int>(actions_.size()));
    actions_.push_back(instr);
  });
}

int ActionVocabulary::operand_index(const Operand& o) const {
  const int pool = static_cast<int>(cfg_.constant_pool.size());
  const int feats = static_cast<int>(cfg_.features.size());
  switch (o.kind()) {
    case OperandKind::Null:
      return 0;
    case OperandKind::Scalar: {
      int i = cfg_.scalar_index(o.scalar_value());
      return i < 0 ? -1 : 1 + i;
    }
    case OperandKind::Matrix: {
      int i = cfg_.feature_index(o.feature());
      return i < 0 ? -1 : 1 + pool + i;
    }
    case OperandKind::Register: {
      int r = o.register_index();
      return (r < 0 || r >= cfg_.register_count) ? -1 : 1 + pool + feats + r;
    }
  }
  return -1;
}

std::uint64_t ActionVocabulary::instruction_key(const Instruction& instr) const {
  std::uint64_t key = static_cast<std::uint64_t>(instr.op);
  for (const auto& o : instr.operands) {
    int idx = operand_index(o);
    if (idx < 0) return ~std::uint64_t{0};
    key = key * 4096 + static_cast<std::uint64_t>(idx) + 1;
  }
  return key;
}

int ActionVocabulary::index_of(const Instruction& instr) const {
  std::uint64_t key = instruction_key(instr);
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

std::uint64_t fingerprint(const ExprTree& tree) {
  const std::string text = tree_to_string(tree);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64 offset basis
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::optional<Dimension> tree_dimension(const ExprTree& tree, const DimRules& rules) {
  if (tree.leaf) {
    if (tree.operand.kind() == OperandKind::Scalar) {
      return Dimension::dimensionless();
    }
    if (!rules.has_feature(tree.operand.feature())) return std::nullopt;
    return rules.feature_dimension(tree.operand.feature());
  }
  std::vector<Dimension> dims;
  for (const auto& child : tree.children) {
    auto d = tree_dimension(*child, rules);
    if (!d) return std::nullopt;
    dims.push_back(*d);
  }
  return rules.result_dimension(tree.op, dims);
}

}  // namespace alphaforge
