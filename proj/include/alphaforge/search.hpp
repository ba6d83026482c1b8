#pragma once

#include <Eigen/Dense>
#include <memory>
#include <ostream>
#include <random>
#include <vector>

#include "alphaforge/env.hpp"
#include "alphaforge/guidance.hpp"
#include "alphaforge/metrics.hpp"

namespace alphaforge {

/// Top-k largest values seen at a node, kept in a min-heap so insertion is
/// O(log k). mean() and max() back the blended Q-value.
class ValueBackup {
 public:
  explicit ValueBackup(int k) : k_(k) {}

  void insert(double v);
  bool empty() const { return heap_.empty(); }
  int size() const { return static_cast<int>(heap_.size()); }
  double mean() const;
  double max() const;
  std::vector<double> sorted_values() const;  // descending, for inspection

 private:
  int k_;
  std::vector<double> heap_;  // min-heap (std::greater ordering)
};

struct SearchConfig {
  double beta = 0.5;   // mean/max blend in the Q-value
  int backup_k = 10;   // values retained per node
  int simulations_per_move = 64;
  double c_puct = 1.25;
  int max_episodes = 2000;
  int alphas_to_mine = 20;
  double ic_threshold = 0.02;  // train-split IC gate for adding to the mined set
  double target_ic = 0.0;      // stop early once a mined alpha reaches this (0 = off)
  unsigned seed = 42;
  double dirichlet_alpha = 0.3;
  double dirichlet_weight = 0.25;
  // Guidance training
  int train_batch = 64;
  int train_steps_per_episode = 1;
  double learning_rate = 0.05;
  int replay_capacity = 4096;
  int hidden_width = 128;
};

/// One node of the search tree. The state and the entering edge's reward are
/// both filled in lazily on first traversal (expansions can create a
/// thousand children; copying program state or scoring alphas for all of
/// them up front would dominate the search). `value_estimate` is the
/// guidance value for the node's state, provisionally inherited from the
/// parent's evaluation until the node itself is expanded.
struct SearchNode {
  EnvState state;
  bool materialized = false;
  double prior = 0.0;
  double reward = 0.0;
  bool reward_known = false;
  double value_estimate = 0.0;
  int visit_count = 0;
  ValueBackup backup;
  bool expanded = false;
  std::vector<Instruction> actions;
  std::vector<std::unique_ptr<SearchNode>> children;

  SearchNode(EnvState s, int backup_k)
      : state(std::move(s)), materialized(true), backup(backup_k) {}
  explicit SearchNode(int backup_k) : backup(backup_k) {}
  bool terminal() const { return state.terminal; }
};

/// Blended action value: r(s,a) + beta*mean(V_child) + (1-beta)*max(V_child).
/// With an empty backup, mean and max fall back to the child's guidance
/// value estimate.
double q_value(const SearchNode& child, double beta);

struct MoveResult {
  int child_index = -1;
  Instruction action;
  Eigen::VectorXd policy;  // visit distribution over the action vocabulary
  int legal_actions = 0;
  int unfiltered_actions = 0;
  int tree_nodes = 0;
};

/// Guided Monte Carlo tree search over one episode of program construction.
/// Children are created only for dimension-legal actions, priors come from
/// the guidance model masked to those actions, and simulations back up
/// telescoped score deltas plus the leaf's value estimate.
class MctsSearch {
 public:
  MctsSearch(const AlphaEnv& env, GuidanceModel& guidance, const SearchConfig& cfg,
             std::mt19937& rng);

  void start_episode();
  const SearchNode& root() const { return *root_; }
  SearchNode& mutable_root() { return *root_; }

  /// Deterministic PUCT argmax over the node's children.
  int select_child(const SearchNode& node) const;
  /// Creates children for the node's legal actions with masked, renormalized
  /// guidance priors. No-op on terminal or already-expanded nodes.
  void expand(SearchNode& node);
  /// Runs simulations_per_move select/expand/evaluate/backup passes from the
  /// current root and returns the visit-count action choice.
  MoveResult run_move();
  /// Reroots the tree at the chosen child, keeping its subtree.
  void advance(int child_index);

  /// Ensures the edge reward of `child` under `parent` is computed.
  void ensure_reward(const SearchNode& parent, SearchNode& child) const;

 private:
  void materialize(SearchNode& parent, int child_index) const;
  void simulate_once();
  void add_root_noise();
  int count_nodes(const SearchNode& node) const;

  const AlphaEnv& env_;
  GuidanceModel& guidance_;
  SearchConfig cfg_;
  std::mt19937& rng_;
  std::unique_ptr<SearchNode> root_;
};

struct EpisodeStats {
  int episode = 0;
  std::string program_text;
  int program_length = 0;
  double train_ic = 0.0;
  double perf = 0.0;
  bool added = false;
  int mined_count = 0;
  double best_ic = 0.0;
  double mean_legal_actions = 0.0;
  double mean_unfiltered_actions = 0.0;
  int tree_nodes = 0;
};

struct MiningOutcome {
  MinedAlphaSet mined;
  int episodes_run = 0;
  double best_train_ic = 0.0;
  std::vector<EpisodeStats> history;
};

/// Outer mining loop: repeated guided-search episodes against a mined set
/// frozen per episode, gated by the IC threshold and fingerprint
/// deduplication, with guidance training on replayed (encoding, visit
/// distribution, return) samples between episodes. Streams one JSON object
/// per episode to `log` when given.
MiningOutcome mine(const Dataset& dataset, const OpsConfig& ops, const DimRules& rules,
                   const MdpConfig& mdp, const SearchConfig& cfg,
                   GuidanceModel& guidance, std::ostream* log = nullptr);

}  // namespace alphaforge
