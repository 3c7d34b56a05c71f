#include "rewire/attack_env.hpp"

#include <cmath>

namespace rewire {

void AttackConfig::validate() const {
  if (budget_mode == BudgetMode::Ratio && !(ratio > 0 && ratio < 1))
    throw InvalidInput("attack config: ratio p must lie in (0,1)");
  if (budget_mode == BudgetMode::Fixed && fixed_k < 1) throw InvalidInput("attack config: fixed K must be >= 1");
  if (penalty_mode == PenaltyMode::Fixed && !(fixed_penalty < 0))
    throw InvalidInput("attack config: fixed penalty must be negative");
}

int compute_budget(const Graph& g, const AttackConfig& cfg) {
  cfg.validate();
  if (cfg.budget_mode == BudgetMode::Fixed) return cfg.fixed_k;
  if (g.num_edges() == 0) throw InvalidInput("compute_budget: graph has no edges");
  const auto k = static_cast<int>(std::floor(cfg.ratio * static_cast<double>(g.num_edges())));
  return std::max(1, k);
}

double step_penalty(const Graph& g, const AttackConfig& cfg) {
  const int k = compute_budget(g, cfg);
  if (cfg.penalty_mode == PenaltyMode::Fixed) return cfg.fixed_penalty;
  return -1.0 / static_cast<double>(k);
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Running: return "running";
    case Outcome::Success: return "success";
    case Outcome::BudgetExhausted: return "budget_exhausted";
    case Outcome::NoValidAction: return "no_valid_action";
  }
  return "unknown";
}

EpisodeState start_episode(const Graph& g, int original_label, const AttackConfig& cfg) {
  EpisodeState s;
  s.current_graph = g;
  s.original_label = original_label;
  s.budget = compute_budget(g, cfg);
  s.penalty = step_penalty(g, cfg);
  if (!has_any_action(g, cfg.third_node_mode)) {
    s.done = true;
    s.outcome = Outcome::NoValidAction;
  }
  return s;
}

StepResult env_step(const EpisodeState& state, const RewiringAction& action, const LabelOracle& oracle,
                    const AttackConfig& cfg) {
  if (state.done) throw ProtocolError("env_step: episode already finished (" + to_string(state.outcome) + ")");
  StepResult r;
  r.state = state;
  r.state.current_graph = apply_rewiring(state.current_graph, action, cfg.third_node_mode);
  r.state.steps_taken += 1;
  const int label = oracle(r.state.current_graph);
  if (label != state.original_label) {
    r.reward = 1.0;
    r.state.done = true;
    r.state.outcome = Outcome::Success;
    return r;
  }
  r.reward = state.penalty;
  if (r.state.steps_taken >= r.state.budget) {
    r.state.done = true;
    r.state.outcome = Outcome::BudgetExhausted;
  } else if (!has_any_action(r.state.current_graph, cfg.third_node_mode)) {
    r.state.done = true;
    r.state.outcome = Outcome::NoValidAction;
  }
  return r;
}

double Trajectory::total_return() const {
  double s = 0;
  for (const auto& step : steps) s += step.reward;
  return s;
}

Trajectory run_episode(const Graph& g, int original_label, const LabelOracle& oracle, const AttackConfig& cfg,
                       const ActionChooser& choose, Rng& rng) {
  int queries = 0;
  const LabelOracle counted = [&](const Graph& x) {
    ++queries;
    return oracle(x);
  };
  Trajectory t;
  EpisodeState state = start_episode(g, original_label, cfg);
  t.budget = state.budget;
  while (!state.done) {
    const auto [action, log_prob] = choose(state.current_graph, rng);
    Graph before = state.current_graph;
    StepResult r = env_step(state, action, counted, cfg);
    t.steps.push_back({std::move(before), action, r.reward, log_prob});
    state = std::move(r.state);
  }
  t.outcome = state.outcome;
  t.oracle_queries = queries;
  t.final_graph = std::move(state.current_graph);
  return t;
}

namespace {

ActionChooser uniform_chooser(ThirdNodeMode mode) {
  return [mode](const Graph& g, Rng& rng) {
    const auto candidates = action_candidates(g, mode);
    if (candidates.empty()) throw EmptyActionSpace("random attack: no valid action");
    const auto i = uniform_index(rng, candidates.size());
    return std::make_pair(candidates[i], -std::log(static_cast<double>(candidates.size())));
  };
}

}  // namespace

Trajectory random_attack(const Graph& g, int original_label, const LabelOracle& oracle, const AttackConfig& cfg,
                         Rng& rng) {
  return run_episode(g, original_label, oracle, cfg, uniform_chooser(cfg.third_node_mode), rng);
}

Trajectory random_s_attack(const Graph& g, int original_label, const LabelOracle& oracle, int step_count, Rng& rng) {
  if (step_count < 0) throw InvalidInput("random_s_attack: negative step count");
  if (step_count == 0) {
    Trajectory t;
    t.outcome = Outcome::BudgetExhausted;
    t.final_graph = g;
    return t;
  }
  AttackConfig cfg;
  cfg.budget_mode = BudgetMode::Fixed;
  cfg.fixed_k = step_count;
  return run_episode(g, original_label, oracle, cfg, uniform_chooser(ThirdNodeMode::TwoHop), rng);
}

}  // namespace rewire
