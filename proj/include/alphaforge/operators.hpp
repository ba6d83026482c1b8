#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace alphaforge {

/// Instruction-set operators. The enum order is the canonical operator order
/// used for deterministic action enumeration and serialization tokens.
enum class Op : std::uint8_t {
  Start = 0,
  End,
  Abs,
  Ln,
  Sign,
  CsRank,
  Add,
  Sub,
  Mul,
  Div,
  TsMean,
  TsStd,
  TsMax,
  TsMin,
  TsDelta,
  TsRank,
  TsCorr,
  TsCov,
};

inline constexpr int kOpCount = 18;

enum class ArityClass : std::uint8_t { Indicator, Unary, Binary, Ternary };

struct OpInfo {
  Op op;
  std::string_view name;
  ArityClass arity_class;
  int arity;        // number of non-Null operands
  int window_slot;  // 0-based operand slot holding a window scalar, -1 if none
};

inline constexpr std::array<OpInfo, kOpCount> kOpTable = {{
    {Op::Start, "Start", ArityClass::Indicator, 0, -1},
    {Op::End, "End", ArityClass::Indicator, 0, -1},
    {Op::Abs, "Abs", ArityClass::Unary, 1, -1},
    {Op::Ln, "Ln", ArityClass::Unary, 1, -1},
    {Op::Sign, "Sign", ArityClass::Unary, 1, -1},
    {Op::CsRank, "CsRank", ArityClass::Unary, 1, -1},
    {Op::Add, "Add", ArityClass::Binary, 2, -1},
    {Op::Sub, "Sub", ArityClass::Binary, 2, -1},
    {Op::Mul, "Mul", ArityClass::Binary, 2, -1},
    {Op::Div, "Div", ArityClass::Binary, 2, -1},
    {Op::TsMean, "TsMean", ArityClass::Binary, 2, 1},
    {Op::TsStd, "TsStd", ArityClass::Binary, 2, 1},
    {Op::TsMax, "TsMax", ArityClass::Binary, 2, 1},
    {Op::TsMin, "TsMin", ArityClass::Binary, 2, 1},
    {Op::TsDelta, "TsDelta", ArityClass::Binary, 2, 1},
    {Op::TsRank, "TsRank", ArityClass::Binary, 2, 1},
    {Op::TsCorr, "TsCorr", ArityClass::Ternary, 3, 2},
    {Op::TsCov, "TsCov", ArityClass::Ternary, 3, 2},
}};

inline const OpInfo& op_info(Op op) { return kOpTable[static_cast<int>(op)]; }
inline std::string_view op_name(Op op) { return op_info(op).name; }
inline int op_arity(Op op) { return op_info(op).arity; }
inline ArityClass op_arity_class(Op op) { return op_info(op).arity_class; }
inline int op_window_slot(Op op) { return op_info(op).window_slot; }
inline bool is_indicator(Op op) {
  return op_arity_class(op) == ArityClass::Indicator;
}

std::optional<Op> op_from_name(std::string_view name);

}  // namespace alphaforge
