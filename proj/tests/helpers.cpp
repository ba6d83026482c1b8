#include "helpers.hpp"

#include <cmath>
#include <limits>

namespace alphaforge::testing {

Eigen::MatrixXd random_panel(int days, int stocks, std::mt19937& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(days, stocks);
  for (int d = 0; d < days; ++d) {
    for (int i = 0; i < stocks; ++i) m(d, i) = normal(rng);
  }
  return m;
}

Dataset random_dataset(int days, int stocks, unsigned seed, double nan_fraction) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Dataset ds;
  for (int d = 0; d < days; ++d) {
    ds.days.push_back("d" + std::to_string(1000 + d));
  }
  for (int i = 0; i < stocks; ++i) {
    ds.stocks.push_back("s" + std::to_string(100 + i));
  }
  for (const char* f : {"open", "close", "high", "low", "volume", "vwap"}) {
    ds.features[f] = Eigen::MatrixXd::Zero(days, stocks);
  }
  for (int i = 0; i < stocks; ++i) {
    double price = 20.0 * std::exp(0.3 * normal(rng));
    for (int d = 0; d < days; ++d) {
      price *= std::exp(0.02 * normal(rng));
      const double open = price * std::exp(0.01 * normal(rng));
      const double close = price;
      const double high = std::max(open, close) * std::exp(0.005 + 0.01 * std::abs(normal(rng)));
      const double low = std::min(open, close) * std::exp(-0.005 - 0.01 * std::abs(normal(rng)));
      ds.features["open"](d, i) = open;
      ds.features["close"](d, i) = close;
      ds.features["high"](d, i) = high;
      ds.features["low"](d, i) = low;
      ds.features["vwap"](d, i) = low + uniform(rng) * (high - low);
      ds.features["volume"](d, i) = 1e6 * std::exp(0.5 * normal(rng));
    }
  }
  if (nan_fraction > 0) {
    for (auto& [name, m] : ds.features) {
      for (int d = 0; d < days; ++d) {
        for (int i = 0; i < stocks; ++i) {
          if (uniform(rng) < nan_fraction) {
            m(d, i) = std::numeric_limits<double>::quiet_NaN();
          }
        }
      }
    }
  }
  const int horizon = std::max(1, days / 5);
  ds.horizon = horizon;
  ds.target = forward_return(ds.feature("close"), horizon);
  ds.splits = fractional_splits(days, 0.6, 0.2);
  return ds;
}

AlphaProgram random_valid_program(std::mt19937& rng, const OpsConfig& ops,
                                  const DimRules* rules, double end_bias) {
  const DimRules fallback = DimRules::defaults();
  const DimRules& dims = rules != nullptr ? *rules : fallback;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  AlphaProgram program;
  RegisterFileState state = RegisterFileState::initial(ops);
  while (true) {
    auto actions = enumerate_actions(state, ops, rules);
    if (actions.empty()) break;
    int pick = -1;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (actions[i].op == Op::End && uniform(rng) < end_bias) {
        pick = static_cast<int>(i);
        break;
      }
    }
    if (pick < 0) {
      std::uniform_int_distribution<int> idx(0, static_cast<int>(actions.size()) - 1);
      pick = idx(rng);
    }
    program.push_back(actions[pick]);
    state = apply_instruction(state, actions[pick], ops, dims);
    if (actions[pick].op == Op::End) break;
  }
  return program;
}

RegisterFileState random_reachable_state(std::mt19937& rng, const OpsConfig& ops,
                                         const DimRules* rules, int min_steps) {
  const DimRules fallback = DimRules::defaults();
  const DimRules& dims = rules != nullptr ? *rules : fallback;

  while (true) {
    RegisterFileState state = RegisterFileState::initial(ops);
    std::uniform_int_distribution<int> steps_dist(min_steps, ops.max_length - 2);
    const int steps = steps_dist(rng);
    bool ok = true;
    for (int s = 0; s < steps; ++s) {
      auto actions = enumerate_actions(state, ops, rules);
      std::vector<Instruction> non_end;
      for (auto& a : actions) {
        if (a.op != Op::End) non_end.push_back(a);
      }
      if (non_end.empty()) {
        ok = false;
        break;
      }
      std::uniform_int_distribution<int> idx(0, static_cast<int>(non_end.size()) - 1);
      state = apply_instruction(state, non_end[idx(rng)], ops, dims);
    }
    if (ok) return state;
  }
}

}  // namespace alphaforge::testing
