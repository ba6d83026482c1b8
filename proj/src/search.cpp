#include "alphaforge/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <json.hpp>

#include "alphaforge/errors.hpp"

namespace alphaforge {

// ---------------------------------------------------------------------------
// ValueBackup
// ---------------------------------------------------------------------------

void ValueBackup::insert(double v) {
  if (static_cast<int>(heap_.size()) < k_) {
    heap_.push_back(v);
    std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
    return;
  }
  if (v > heap_.front()) {
    std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
    heap_.back() = v;
    std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
  }
}

double ValueBackup::mean() const {
  double s = 0;
  for (double v : heap_) s += v;
  return heap_.empty() ? 0.0 : s / static_cast<double>(heap_.size());
}

double ValueBackup::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : heap_) m = std::max(m, v);
  return m;
}

std::vector<double> ValueBackup::sorted_values() const {
  std::vector<double> out = heap_;
  std::sort(out.begin(), out.end(), std::greater<>{});
  return out;
}

double q_value(const SearchNode& child, double beta) {
  const double mean = child.backup.empty() ? child.value_estimate : child.backup.mean();
  const double max = child.backup.empty() ? child.value_estimate : child.backup.max();
  return child.reward + beta * mean + (1.0 - beta) * max;
}

// ---------------------------------------------------------------------------
// MctsSearch
// ---------------------------------------------------------------------------

MctsSearch::MctsSearch(const AlphaEnv& env, GuidanceModel& guidance,
                       const SearchConfig& cfg, std::mt19937& rng)
    : env_(env), guidance_(guidance), cfg_(cfg), rng_(rng) {}

void MctsSearch::start_episode() {
  root_ = std::make_unique<SearchNode>(env_.reset(), cfg_.backup_k);
}

int MctsSearch::select_child(const SearchNode& node) const {
  const double sqrt_visits = std::sqrt(static_cast<double>(node.visit_count));
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const SearchNode& child = *node.children[i];
    const double u =
        cfg_.c_puct * child.prior * sqrt_visits / (1.0 + child.visit_count);
    const double score = q_value(child, cfg_.beta) + u;
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  return best;
}

void MctsSearch::expand(SearchNode& node) {
  if (node.expanded || node.terminal()) return;
  node.actions = env_.legal_actions(node.state);
  const GuidancePrediction pred = guidance_.predict(env_.encode(node.state));
  node.value_estimate = pred.value;

  std::vector<double> priors(node.actions.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < node.actions.size(); ++i) {
    const int idx = env_.vocabulary().index_of(node.actions[i]);
    if (idx >= 0) priors[i] = std::max(0.0, pred.priors(idx));
    total += priors[i];
  }
  node.children.reserve(node.actions.size());
  for (std::size_t i = 0; i < node.actions.size(); ++i) {
    auto child = std::make_unique<SearchNode>(cfg_.backup_k);
    child->prior = total > 0 ? priors[i] / total
                             : 1.0 / static_cast<double>(node.actions.size());
    child->value_estimate = pred.value;  // provisional until its own expansion
    node.children.push_back(std::move(child));
  }
  node.expanded = true;
}

void MctsSearch::materialize(SearchNode& parent, int child_index) const {
  SearchNode& child = *parent.children[child_index];
  if (child.materialized) return;
  child.state = env_.apply_action(parent.state, parent.actions[child_index]);
  child.materialized = true;
}

void MctsSearch::ensure_reward(const SearchNode& parent, SearchNode& child) const {
  if (child.reward_known) return;
  child.reward = env_.state_perf(child.state) - env_.state_perf(parent.state);
  child.reward_known = true;
}

void MctsSearch::add_root_noise() {
  if (cfg_.dirichlet_weight <= 0 || root_->children.empty()) return;
  std::gamma_distribution<double> gamma(cfg_.dirichlet_alpha, 1.0);
  std::vector<double> noise(root_->children.size());
  double total = 0;
  for (auto& n : noise) {
    n = gamma(rng_);
    total += n;
  }
  if (total <= 0) return;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    SearchNode& child = *root_->children[i];
    child.prior = (1.0 - cfg_.dirichlet_weight) * child.prior +
                  cfg_.dirichlet_weight * noise[i] / total;
  }
}

void MctsSearch::simulate_once() {
  std::vector<SearchNode*> path{root_.get()};
  SearchNode* node = root_.get();
  while (node->expanded && !node->terminal()) {
    const int idx = select_child(*node);
    materialize(*node, idx);
    SearchNode* child = node->children[idx].get();
    ensure_reward(*node, *child);
    node = child;
    path.push_back(node);
  }

  double value = 0.0;  // future return below the leaf; 0 at terminal leaves
  if (!node->terminal()) {
    expand(*node);
    value = node->value_estimate;
  }

  for (int i = static_cast<int>(path.size()) - 1; i >= 0; --i) {
    path[i]->backup.insert(value);
    path[i]->visit_count += 1;
    if (i > 0) value += path[i]->reward;
  }
}

int MctsSearch::count_nodes(const SearchNode& node) const {
  int n = 1;
  for (const auto& c : node.children) n += count_nodes(*c);
  return n;
}

MoveResult MctsSearch::run_move() {
  expand(*root_);
  add_root_noise();
  for (int s = 0; s < cfg_.simulations_per_move; ++s) simulate_once();

  MoveResult result;
  result.legal_actions = static_cast<int>(root_->children.size());
  result.unfiltered_actions =
      static_cast<int>(env_.unfiltered_actions(root_->state).size());
  result.tree_nodes = count_nodes(*root_);

  int best = -1;
  int best_visits = -1;
  int total_visits = 0;
  for (std::size_t i = 0; i < root_->children.size(); ++i) {
    const int v = root_->children[i]->visit_count;
    total_visits += v;
    if (v > best_visits) {
      best_visits = v;
      best = static_cast<int>(i);
    }
  }
  result.child_index = best;
  result.action = root_->actions[best];

  result.policy = Eigen::VectorXd::Zero(env_.vocabulary().size());
  if (total_visits > 0) {
    for (std::size_t i = 0; i < root_->children.size(); ++i) {
      const int idx = env_.vocabulary().index_of(root_->actions[i]);
      if (idx >= 0) {
        result.policy(idx) =
            static_cast<double>(root_->children[i]->visit_count) / total_visits;
      }
    }
  }
  return result;
}

void MctsSearch::advance(int child_index) {
  materialize(*root_, child_index);
  ensure_reward(*root_, *root_->children[child_index]);
  std::unique_ptr<SearchNode> next = std::move(root_->children[child_index]);
  root_ = std::move(next);
}

// ---------------------------------------------------------------------------
// Mining loop
// ---------------------------------------------------------------------------

namespace {

struct ReplaySample {
  Eigen::VectorXd encoding;
  Eigen::VectorXd policy;
  double return_target = 0.0;
};

}  // namespace

MiningOutcome mine(const Dataset& dataset, const OpsConfig& ops, const DimRules& rules,
                   const MdpConfig& mdp, const SearchConfig& cfg,
                   GuidanceModel& guidance, std::ostream* log) {
  MiningOutcome outcome;
  ActionVocabulary vocab(ops);
  EvalCache cache;

  // Mining only ever scores the training split; a view truncated after it
  // keeps rolling evaluations from paying for rows that are never read
  // (trailing windows are causal, so values on the kept rows are identical).
  const SplitRange train = dataset.splits.train;
  Dataset train_view;
  train_view.days.assign(dataset.days.begin(), dataset.days.begin() + train.end);
  train_view.stocks = dataset.stocks;
  for (const auto& [name, m] : dataset.features) {
    train_view.features[name] = m.topRows(train.end);
  }
  train_view.target = dataset.target.topRows(train.end);
  train_view.horizon = dataset.horizon;
  train_view.splits.train = train;
  train_view.splits.valid = SplitRange{train.end, train.end};
  train_view.splits.test = SplitRange{train.end, train.end};

  AlphaEnv env(train_view, ops, rules, vocab, mdp, &outcome.mined, &cache);
  std::mt19937 rng(cfg.seed);
  std::deque<ReplaySample> replay;

  const Eigen::MatrixXd target_train = train_view.target.middleRows(
      train.begin, train.size());

  outcome.best_train_ic = -std::numeric_limits<double>::infinity();

  for (int episode = 1; episode <= cfg.max_episodes; ++episode) {
    MctsSearch search(env, guidance, cfg, rng);
    search.start_episode();

    std::vector<Eigen::VectorXd> encodings;
    std::vector<Eigen::VectorXd> policies;
    std::vector<double> rewards;
    double legal_sum = 0, unfiltered_sum = 0;
    int moves = 0;
    int last_tree_nodes = 0;

    while (!search.root().terminal()) {
      const Eigen::VectorXd encoding = env.encode(search.root().state);
      MoveResult mv = search.run_move();
      SearchNode& child = *search.mutable_root().children[mv.child_index];
      search.ensure_reward(search.root(), child);
      encodings.push_back(encoding);
      policies.push_back(std::move(mv.policy));
      rewards.push_back(child.reward);
      legal_sum += mv.legal_actions;
      unfiltered_sum += mv.unfiltered_actions;
      last_tree_nodes = mv.tree_nodes;
      ++moves;
      search.advance(mv.child_index);
    }

    const EnvState& terminal_state = search.root().state;
    EpisodeStats stats;
    stats.episode = episode;
    stats.program_length = terminal_state.program.size();
    stats.program_text = serialize(terminal_state.program);
    stats.mean_legal_actions = moves > 0 ? legal_sum / moves : 0.0;
    stats.mean_unfiltered_actions = moves > 0 ? unfiltered_sum / moves : 0.0;
    stats.tree_nodes = last_tree_nodes;

    const auto& reg0 = terminal_state.registers.slot(0);
    bool added = false;
    double train_ic = std::numeric_limits<double>::quiet_NaN();
    double final_perf = 0.0;
    if (reg0.occupied()) {
      EvalContext ctx{train_view, train, &cache};
      const Eigen::MatrixXd z = evaluate(reg0.tree, ctx);
      train_ic = ic(z, target_train);
      final_perf = env.state_perf(terminal_state);
      const std::uint64_t fp = fingerprint(reg0.tree);
      const bool mineable =
          std::isfinite(train_ic) && finite_fraction(z) >= mdp.min_coverage;
      if (mineable && train_ic >= cfg.ic_threshold && !outcome.mined.contains(fp)) {
        AlphaRecord record;
        record.program = terminal_state.program;
        record.tree = reg0.tree;
        record.values = z;
        record.ic = train_ic;
        record.perf_at_mining = final_perf;
        added = outcome.mined.add(std::move(record));
        if (added) env.clear_perf_cache();  // the discount baseline moved
      }
      if (mineable) {
        outcome.best_train_ic = std::max(outcome.best_train_ic, train_ic);
      }
    }
    stats.train_ic = train_ic;
    stats.perf = final_perf;
    stats.added = added;
    stats.mined_count = outcome.mined.size();
    stats.best_ic = outcome.best_train_ic;

    // Discounted return-to-go targets for the value head.
    if (!encodings.empty()) {
      double g = 0.0;
      std::vector<double> returns(rewards.size());
      for (int t = static_cast<int>(rewards.size()) - 1; t >= 0; --t) {
        g = rewards[t] + mdp.gamma * g;
        returns[t] = g;
      }
      for (std::size_t t = 0; t < encodings.size(); ++t) {
        replay.push_back({std::move(encodings[t]), std::move(policies[t]), returns[t]});
        if (static_cast<int>(replay.size()) > cfg.replay_capacity) replay.pop_front();
      }
    }

    if (guidance.trainable() && static_cast<int>(replay.size()) >= cfg.train_batch) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(replay.size()) - 1);
      for (int step = 0; step < cfg.train_steps_per_episode; ++step) {
        Eigen::MatrixXd X(cfg.train_batch, replay.front().encoding.size());
        Eigen::MatrixXd P(cfg.train_batch, replay.front().policy.size());
        Eigen::VectorXd Z(cfg.train_batch);
        for (int b = 0; b < cfg.train_batch; ++b) {
          const ReplaySample& s = replay[pick(rng)];
          X.row(b) = s.encoding.transpose();
          P.row(b) = s.policy.transpose();
          Z(b) = s.return_target;
        }
        guidance.train(X, P, Z, cfg.learning_rate);
      }
    }

    if (log != nullptr) {
      nlohmann::json j{
          {"episode", stats.episode},
          {"program_length", stats.program_length},
          {"train_ic", std::isfinite(train_ic) ? train_ic : 0.0},
          {"perf", stats.perf},
          {"added", stats.added},
          {"mined_count", stats.mined_count},
          {"best_ic", std::isfinite(stats.best_ic) ? stats.best_ic : 0.0},
          {"mean_legal_actions", stats.mean_legal_actions},
          {"mean_unfiltered_actions", stats.mean_unfiltered_actions},
          {"action_space_reduction",
           stats.mean_unfiltered_actions > 0
               ? 1.0 - stats.mean_legal_actions / stats.mean_unfiltered_actions
               : 0.0},
          {"tree_nodes", stats.tree_nodes},
      };
      (*log) << j.dump() << '\n';
    }
    outcome.history.push_back(std::move(stats));
    outcome.episodes_run = episode;

    if (outcome.mined.size() >= cfg.alphas_to_mine) break;
    if (cfg.target_ic > 0 && outcome.best_train_ic >= cfg.target_ic) break;
  }
  if (!std::isfinite(outcome.best_train_ic)) outcome.best_train_ic = 0.0;
  return outcome;
}

}  // namespace alphaforge
