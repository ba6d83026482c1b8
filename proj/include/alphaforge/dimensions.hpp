#pragma once

#include <array>
#include <cstdlib>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "alphaforge/operators.hpp"

namespace alphaforge {

/// Integer exponents over the base dimensions (currency, shares, time).
/// Prices are (1,0,0), volume is (0,1,0), pure numbers are (0,0,0).
class Dimension {
 public:
  constexpr Dimension() = default;
  constexpr Dimension(int currency, int shares, int time)
      : e_{currency, shares, time} {}

  static constexpr Dimension dimensionless() { return Dimension(0, 0, 0); }
  static constexpr Dimension currency() { return Dimension(1, 0, 0); }
  static constexpr Dimension shares() { return Dimension(0, 1, 0); }

  int currency_exp() const { return e_[0]; }
  int shares_exp() const { return e_[1]; }
  int time_exp() const { return e_[2]; }

  bool is_dimensionless() const {
    return e_[0] == 0 && e_[1] == 0 && e_[2] == 0;
  }
  int max_abs_exponent() const {
    return std::max({std::abs(e_[0]), std::abs(e_[1]), std::abs(e_[2])});
  }

  Dimension operator+(const Dimension& o) const {
    return Dimension(e_[0] + o.e_[0], e_[1] + o.e_[1], e_[2] + o.e_[2]);
  }
  Dimension operator-(const Dimension& o) const {
    return Dimension(e_[0] - o.e_[0], e_[1] - o.e_[1], e_[2] - o.e_[2]);
  }
  bool operator==(const Dimension& o) const { return e_ == o.e_; }
  bool operator!=(const Dimension& o) const { return e_ != o.e_; }

  std::string to_string() const;

 private:
  std::array<int, 3> e_{0, 0, 0};
};

/// Per-operator dimensional legality and the feature dimension table.
///
/// Legality of an operator application is decided from operand dimensions
/// alone, so a subtree checked once never needs rechecking. result_dimension
/// returns std::nullopt for an illegal combination instead of throwing.
class DimRules {
 public:
  /// Default table: open/close/high/low/vwap are currency, volume is shares.
  static DimRules defaults();

  /// Throws UnknownFeature for a feature without an entry.
  Dimension feature_dimension(const std::string& feature) const;
  bool has_feature(const std::string& feature) const;
  void set_feature_dimension(const std::string& feature, Dimension dim);

  /// Output dimension of applying `op` to operands with dimensions
  /// `args` (window scalars included as dimensionless entries, in slot
  /// order). std::nullopt means the combination is dimensionally illegal.
  std::optional<Dimension> result_dimension(Op op,
                                            std::span<const Dimension> args) const;

  int exponent_bound() const { return exponent_bound_; }
  void set_exponent_bound(int bound) { exponent_bound_ = bound; }

  const std::map<std::string, Dimension>& feature_table() const {
    return feature_dims_;
  }

 private:
  std::map<std::string, Dimension> feature_dims_;
  int exponent_bound_ = 3;
};

}  // namespace alphaforge
