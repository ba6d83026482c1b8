#include <doctest.h>

#include <random>

#include "alphaforge/dimensions.hpp"
#include "alphaforge/errors.hpp"

using namespace alphaforge;

TEST_CASE("feature dimensions match the base table") {
  DimRules rules = DimRules::defaults();
  CHECK(rules.feature_dimension("close") == Dimension(1, 0, 0));
  CHECK(rules.feature_dimension("open") == Dimension(1, 0, 0));
  CHECK(rules.feature_dimension("high") == Dimension(1, 0, 0));
  CHECK(rules.feature_dimension("low") == Dimension(1, 0, 0));
  CHECK(rules.feature_dimension("vwap") == Dimension(1, 0, 0));
  CHECK(rules.feature_dimension("volume") == Dimension(0, 1, 0));
  CHECK_THROWS_AS(rules.feature_dimension("beta"), UnknownFeature);
}

TEST_CASE("addition requires like dimensions") {
  DimRules rules = DimRules::defaults();
  const Dimension price(1, 0, 0), vol(0, 1, 0);

  auto add_pp = rules.result_dimension(Op::Add, std::array{price, price});
  REQUIRE(add_pp.has_value());
  CHECK(*add_pp == price);

  CHECK_FALSE(rules.result_dimension(Op::Add, std::array{price, vol}).has_value());
  CHECK_FALSE(rules.result_dimension(Op::Sub, std::array{vol, price}).has_value());

  auto div_pp = rules.result_dimension(Op::Div, std::array{price, price});
  REQUIRE(div_pp.has_value());
  CHECK(div_pp->is_dimensionless());
}

TEST_CASE("multiplicative dimensions form a group") {
  DimRules rules = DimRules::defaults();
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> e(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const Dimension a(e(rng), e(rng), e(rng));
    const Dimension b(e(rng), e(rng), e(rng));
    auto ab = rules.result_dimension(Op::Mul, std::array{a, b});
    REQUIRE(ab.has_value());
    auto back = rules.result_dimension(Op::Div, std::array{*ab, b});
    REQUIRE(back.has_value());
    CHECK(*back == a);
  }
}

TEST_CASE("rule table is total over the operator set") {
  DimRules rules = DimRules::defaults();
  const Dimension price(1, 0, 0);
  const Dimension none = Dimension::dimensionless();
  for (const auto& info : kOpTable) {
    std::vector<Dimension> args;
    for (int i = 0; i < info.arity; ++i) {
      args.push_back(i == info.window_slot ? none : price);
    }
    // Legal or Illegal, but never a throw.
    CHECK_NOTHROW(rules.result_dimension(info.op, args));
  }
}

TEST_CASE("ln requires a dimensionless argument") {
  DimRules rules = DimRules::defaults();
  CHECK_FALSE(rules.result_dimension(Op::Ln, std::array{Dimension(1, 0, 0)}).has_value());
  auto ok = rules.result_dimension(Op::Ln, std::array{Dimension::dimensionless()});
  REQUIRE(ok.has_value());
  CHECK(ok->is_dimensionless());
}

TEST_CASE("ranks, sign, and correlation output dimensionless") {
  DimRules rules = DimRules::defaults();
  const Dimension price(1, 0, 0);
  const Dimension none = Dimension::dimensionless();
  for (Op op : {Op::Sign, Op::CsRank}) {
    auto d = rules.result_dimension(op, std::array{price});
    REQUIRE(d.has_value());
    CHECK(d->is_dimensionless());
  }
  auto tsr = rules.result_dimension(Op::TsRank, std::array{price, none});
  REQUIRE(tsr.has_value());
  CHECK(tsr->is_dimensionless());
  auto corr = rules.result_dimension(Op::TsCorr, std::array{price, Dimension(0, 1, 0), none});
  REQUIRE(corr.has_value());
  CHECK(corr->is_dimensionless());
}

TEST_CASE("covariance adds the two series dimensions") {
  DimRules rules = DimRules::defaults();
  auto d = rules.result_dimension(
      Op::TsCov, std::array{Dimension(1, 0, 0), Dimension(0, 1, 0),
                            Dimension::dimensionless()});
  REQUIRE(d.has_value());
  CHECK(*d == Dimension(1, 1, 0));
}

TEST_CASE("exponents beyond the bound are illegal") {
  DimRules rules = DimRules::defaults();
  rules.set_exponent_bound(3);
  const Dimension cubed(3, 0, 0);
  CHECK_FALSE(
      rules.result_dimension(Op::Mul, std::array{cubed, Dimension(1, 0, 0)}).has_value());
  CHECK(rules.result_dimension(Op::Mul, std::array{cubed, Dimension(0, 0, 0)}).has_value());
}

TEST_CASE("windows must be dimensionless") {
  DimRules rules = DimRules::defaults();
  const Dimension price(1, 0, 0);
  CHECK_FALSE(rules.result_dimension(Op::TsMean, std::array{price, price}).has_value());
  auto ok = rules.result_dimension(Op::TsMean,
                                   std::array{price, Dimension::dimensionless()});
  REQUIRE(ok.has_value());
  CHECK(*ok == price);
}
