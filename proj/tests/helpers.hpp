#pragma once

#include <random>

#include "alphaforge/data.hpp"
#include "alphaforge/dimensions.hpp"
#include "alphaforge/program.hpp"

namespace alphaforge::testing {

/// Random full-grid dataset with plausible OHLCV bars; optional NaN holes.
Dataset random_dataset(int days, int stocks, unsigned seed,
                       double nan_fraction = 0.0);

/// Random panel of standard normals (no NaNs).
Eigen::MatrixXd random_panel(int days, int stocks, std::mt19937& rng);

/// Random program built by walking legal actions (dimension-filtered when
/// `rules` is non-null) until End or a dead end; End is preferred with
/// probability `end_bias` whenever legal.
AlphaProgram random_valid_program(std::mt19937& rng, const OpsConfig& ops,
                                  const DimRules* rules, double end_bias = 0.25);

/// Register state reached after running a random prefix of a valid program
/// (never terminal).
RegisterFileState random_reachable_state(std::mt19937& rng, const OpsConfig& ops,
                                         const DimRules* rules, int min_steps = 1);

}  // namespace alphaforge::testing
