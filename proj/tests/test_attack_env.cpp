#include <doctest.h>

#include <memory>

#include "env_checks.hpp"
#include "rewire/attack_env.hpp"
#include "test_util.hpp"

using namespace rewire;
using rewire::test::complete_graph;
using rewire::test::path_graph;

namespace {

Graph graph_with_edges(int edges) {
  // A path long enough to carry `edges` edges.
  return path_graph(edges + 1);
}

const LabelOracle never_flip = [](const Graph&) { return 0; };
const LabelOracle always_flip = [](const Graph&) { return 1; };

}  // namespace

TEST_CASE("compute_budget examples") {
  AttackConfig c;
  c.ratio = 0.02;
  CHECK(compute_budget(graph_with_edges(100), c) == 2);
  c.ratio = 0.03;
  CHECK(compute_budget(graph_with_edges(10), c) == 1);
  AttackConfig f;
  f.budget_mode = BudgetMode::Fixed;
  f.fixed_k = 3;
  CHECK(compute_budget(graph_with_edges(1), f) == 3);
  CHECK(compute_budget(graph_with_edges(500), f) == 3);
  CHECK_THROWS_AS(compute_budget(Graph(3, {}), c), InvalidInput);
  c.ratio = 0;
  CHECK_THROWS_AS(compute_budget(graph_with_edges(10), c), InvalidInput);
}

TEST_CASE("step_penalty examples") {
  AttackConfig c;
  c.ratio = 0.02;
  CHECK(step_penalty(graph_with_edges(100), c) == -0.5);
  c.penalty_mode = PenaltyMode::Fixed;
  CHECK(step_penalty(graph_with_edges(100), c) == -0.5);
  CHECK(step_penalty(graph_with_edges(1000), c) == -0.5);
  AttackConfig one;
  CHECK(step_penalty(graph_with_edges(10), one) == -1.0);
}

TEST_CASE("env_step rewards a flip with 1 and ends the episode") {
  AttackConfig c;
  c.budget_mode = BudgetMode::Fixed;
  c.fixed_k = 3;
  const EpisodeState s = start_episode(path_graph(4), 0, c);
  const StepResult r = env_step(s, {0, 1, 2}, always_flip, c);
  CHECK(r.reward == 1.0);
  CHECK(r.state.done);
  CHECK(r.state.outcome == Outcome::Success);
  CHECK(r.state.steps_taken == 1);
  CHECK_THROWS_AS(env_step(r.state, {0, 1, 2}, always_flip, c), ProtocolError);
}

TEST_CASE("constant oracle exhausts the budget with penalties") {
  AttackConfig c;
  c.budget_mode = BudgetMode::Fixed;
  c.fixed_k = 2;
  Rng rng(1);
  const Trajectory t = random_attack(path_graph(8), 0, never_flip, c, rng);
  REQUIRE(t.num_steps() == 2);
  CHECK(t.steps[0].reward == -0.5);
  CHECK(t.steps[1].reward == -0.5);
  CHECK(t.outcome == Outcome::BudgetExhausted);
  CHECK(t.oracle_queries == 2);
}

TEST_CASE("running out of actions ends the episode") {
  AttackConfig c;
  c.budget_mode = BudgetMode::Fixed;
  c.fixed_k = 5;
  // Rewiring P4 by (1, 0, 3) leaves a triangle and an isolated node.
  const EpisodeState s = start_episode(path_graph(4), 0, c);
  const StepResult r = env_step(s, {1, 0, 3}, never_flip, c);
  CHECK(r.reward == -0.2);
  CHECK(r.state.done);
  CHECK(r.state.outcome == Outcome::NoValidAction);
  const EpisodeState k4 = start_episode(complete_graph(4), 0, c);
  CHECK(k4.done);
  CHECK(k4.outcome == Outcome::NoValidAction);
  Rng rng(2);
  const Trajectory t = random_attack(complete_graph(5), 0, never_flip, c, rng);
  CHECK(t.num_steps() == 0);
  CHECK(t.outcome == Outcome::NoValidAction);
}

TEST_CASE("env_step rejects invalid actions") {
  AttackConfig c;
  const EpisodeState s = start_episode(path_graph(10), 0, c);
  CHECK_THROWS_AS(env_step(s, {1, 0, 2}, never_flip, c), RejectedAction);
}

TEST_CASE("random_attack with K = 1 takes at most one action") {
  AttackConfig c;
  Rng rng(3);
  for (int t = 0; t < 20; ++t) CHECK(random_attack(path_graph(10), 0, never_flip, c, rng).num_steps() <= 1);
}

TEST_CASE("random_attack finds a hub-cutting move and is reproducible") {
  // Flips whenever the hub of a star loses an edge.
  const Graph g(7, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 5}, {3, 6}, {4, 5}});
  const LabelOracle hub = [](const Graph& h) { return h.degree(0) < 3 ? 1 : 0; };
  AttackConfig c;
  c.budget_mode = BudgetMode::Fixed;
  c.fixed_k = 2;
  int wins = 0;
  for (int t = 0; t < 50; ++t) {
    Rng rng(derive_seed(4, "hub", static_cast<std::uint64_t>(t)));
    if (random_attack(g, 0, hub, c, rng).success()) ++wins;
  }
  CHECK(wins > 0);
  Rng a(9), b(9);
  const Trajectory ta = random_attack(g, 0, hub, c, a);
  const Trajectory tb = random_attack(g, 0, hub, c, b);
  CHECK(ta.num_steps() == tb.num_steps());
  for (int s = 0; s < ta.num_steps(); ++s) CHECK(ta.steps[s].action == tb.steps[s].action);
}

TEST_CASE("random_s_attack replays a step count") {
  Rng rng(5);
  const Trajectory zero = random_s_attack(path_graph(6), 0, always_flip, 0, rng);
  CHECK(zero.num_steps() == 0);
  CHECK_FALSE(zero.success());
  const Trajectory three = random_s_attack(test::random_connected_graph(12, 0.3, rng), 0, never_flip, 3, rng);
  CHECK(three.num_steps() == 3);
  CHECK(three.oracle_queries == 3);
  CHECK_THROWS_AS(random_s_attack(path_graph(6), 0, never_flip, -1, rng), InvalidInput);
  Rng a(6), b(6);
  const Graph g = test::random_connected_graph(12, 0.3, rng);
  const Trajectory ta = random_s_attack(g, 0, never_flip, 2, a);
  const Trajectory tb = random_s_attack(g, 0, never_flip, 2, b);
  CHECK(ta.final_graph == tb.final_graph);
}

TEST_CASE("ReWatt-a episodes may add edges beyond two hops") {
  AttackConfig c;
  c.third_node_mode = ThirdNodeMode::AnyNode;
  c.budget_mode = BudgetMode::Fixed;
  c.fixed_k = 1;
  const EpisodeState s = start_episode(path_graph(6), 0, c);
  const StepResult r = env_step(s, {0, 1, 5}, never_flip, c);
  CHECK(r.state.current_graph.has_edge(0, 5));
  AttackConfig two = c;
  two.third_node_mode = ThirdNodeMode::TwoHop;
  CHECK_THROWS_AS(env_step(start_episode(path_graph(6), 0, two), {0, 1, 5}, never_flip, two), RejectedAction);
}

TEST_CASE("reward and termination contract over scripted oracles") {
  const auto r = test::reward_contract_check(100, 1);
  CHECK(r.episodes > 1000);
  for (const auto& v : r.violations) FAIL_CHECK(v);
  CHECK(r.violation_count == 0);
}
