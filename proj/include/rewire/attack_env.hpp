#ifndef REWIRE_ATTACK_ENV_HPP
#define REWIRE_ATTACK_ENV_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rewire/graph.hpp"
#include "rewire/oracle.hpp"
#include "rewire/random.hpp"

namespace rewire {

enum class BudgetMode { Ratio, Fixed };
enum class PenaltyMode { Flexible, Fixed };

struct AttackConfig {
  BudgetMode budget_mode = BudgetMode::Ratio;
  double ratio = 0.03;  // p in K = p * |E|
  int fixed_k = 1;
  PenaltyMode penalty_mode = PenaltyMode::Flexible;
  double fixed_penalty = -0.5;
  ThirdNodeMode third_node_mode = ThirdNodeMode::TwoHop;

  void validate() const;
};

/// K = max(1, floor(p * |E|)) in ratio mode, fixed_k otherwise.
int compute_budget(const Graph& g, const AttackConfig& cfg);
/// -1 / K in flexible mode, the configured constant otherwise.
double step_penalty(const Graph& g, const AttackConfig& cfg);

enum class Outcome { Running, Success, BudgetExhausted, NoValidAction };
std::string to_string(Outcome o);

struct EpisodeState {
  Graph current_graph;
  int original_label = 0;
  int steps_taken = 0;
  int budget = 0;
  double penalty = 0;
  bool done = false;
  Outcome outcome = Outcome::Running;
};

/// Fresh episode on `g`, whose unmodified prediction is `original_label`.
/// The episode is finished immediately when no action is available.
EpisodeState start_episode(const Graph& g, int original_label, const AttackConfig& cfg);

struct StepResult {
  EpisodeState state;
  double reward = 0;
};

/// Applies one action and queries the oracle once on the resulting graph.
/// Throws ProtocolError on a finished episode and RejectedAction on an
/// invalid action.
StepResult env_step(const EpisodeState& state, const RewiringAction& action, const LabelOracle& oracle,
                    const AttackConfig& cfg);

struct TrajectoryStep {
  Graph state;  // graph the action was taken on
  RewiringAction action;
  double reward = 0;
  double log_prob = 0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  Outcome outcome = Outcome::Running;
  int budget = 0;
  int oracle_queries = 0;
  Graph final_graph;

  int num_steps() const { return static_cast<int>(steps.size()); }
  bool success() const { return outcome == Outcome::Success; }
  double total_return() const;
};

/// Picks the next action for a state; returns the action and its log-probability.
using ActionChooser = std::function<std::pair<RewiringAction, double>(const Graph&, Rng&)>;

Trajectory run_episode(const Graph& g, int original_label, const LabelOracle& oracle, const AttackConfig& cfg,
                       const ActionChooser& choose, Rng& rng);

/// Uniform choice among all valid actions of the current state at each step.
Trajectory random_attack(const Graph& g, int original_label, const LabelOracle& oracle, const AttackConfig& cfg,
                         Rng& rng);

/// Exactly `step_count` uniform two-hop rewirings (fewer on success or when
/// the action space empties).
Trajectory random_s_attack(const Graph& g, int original_label, const LabelOracle& oracle, int step_count, Rng& rng);

}  // namespace rewire

#endif  // REWIRE_ATTACK_ENV_HPP
