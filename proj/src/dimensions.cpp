#include "alphaforge/dimensions.hpp"

#include "alphaforge/errors.hpp"

namespace alphaforge {

std::string Dimension::to_string() const {
  return "(" + std::to_string(e_[0]) + "," + std::to_string(e_[1]) + "," +
         std::to_string(e_[2]) + ")";
}

DimRules DimRules::defaults() {
  DimRules rules;
  for (const char* f : {"open", "close", "high", "low", "vwap"}) {
    rules.feature_dims_[f] = Dimension::currency();
  }
  rules.feature_dims_["volume"] = Dimension::shares();
  return rules;
}

Dimension DimRules::feature_dimension(const std::string& feature) const {
  auto it = feature_dims_.find(feature);
  if (it == feature_dims_.end()) {
    throw UnknownFeature("no dimension entry for feature '" + feature + "'");
  }
  return it->second;
}

bool DimRules::has_feature(const std::string& feature) const {
  return feature_dims_.count(feature) > 0;
}

void DimRules::set_feature_dimension(const std::string& feature, Dimension dim) {
  feature_dims_[feature] = dim;
}

std::optional<Dimension> DimRules::result_dimension(
    Op op, std::span<const Dimension> args) const {
  if (static_cast<int>(args.size()) != op_arity(op)) return std::nullopt;

  std::optional<Dimension> out;
  switch (op) {
    case Op::Start:
    case Op::End:
      out = Dimension::dimensionless();
      break;
    case Op::Add:
    case Op::Sub:
      // Translation requires like dimensions.
      if (args[0] != args[1]) return std::nullopt;
      out = args[0];
      break;
    case Op::Mul:
      out = args[0] + args[1];
      break;
    case Op::Div:
      out = args[0] - args[1];
      break;
    case Op::Abs:
      out = args[0];
      break;
    case Op::Ln:
      // Logarithms only apply to pure numbers.
      if (!args[0].is_dimensionless()) return std::nullopt;
      out = Dimension::dimensionless();
      break;
    case Op::Sign:
    case Op::CsRank:
      out = Dimension::dimensionless();
      break;
    case Op::TsMean:
    case Op::TsStd:
    case Op::TsMax:
    case Op::TsMin:
    case Op::TsDelta:
      if (!args[1].is_dimensionless()) return std::nullopt;  // window
      out = args[0];
      break;
    case Op::TsRank:
      if (!args[1].is_dimensionless()) return std::nullopt;
      out = Dimension::dimensionless();
      break;
    case Op::TsCorr:
      if (!args[2].is_dimensionless()) return std::nullopt;
      out = Dimension::dimensionless();
      break;
    case Op::TsCov:
      if (!args[2].is_dimensionless()) return std::nullopt;
      out = args[0] + args[1];
      break;
  }
  if (out && out->max_abs_exponent() > exponent_bound_) return std::nullopt;
  return out;
}

}  // namespace alphaforge
