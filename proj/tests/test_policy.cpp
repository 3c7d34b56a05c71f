#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "gradient_checks.hpp"
#include "rewire/features.hpp"
#include "rewire/policy.hpp"
#include "test_util.hpp"

using namespace rewire;
using rewire::test::path_graph;

namespace {

PolicyModel zero_head_policy(int input_dim, Rng& rng) {
  PolicyConfig cfg;
  cfg.embed_dim = 4;
  cfg.zero_init_heads = true;
  return init_policy(input_dim, cfg, rng);
}

// Hub graphs: node 0 joins 8 random nodes over a sparse background.
std::vector<Graph> hub_graphs(int count, std::uint64_t seed) {
  std::vector<Graph> out;
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const int n = 20;
    std::vector<int> others(n - 1);
    std::iota(others.begin(), others.end(), 1);
    std::shuffle(others.begin(), others.end(), rng);
    std::vector<Edge> edges;
    for (int k = 0; k < 8; ++k) edges.push_back(make_edge(0, others[static_cast<std::size_t>(k)]));
    std::bernoulli_distribution coin(0.12);
    for (int a = 1; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (coin(rng)) edges.push_back({a, b});
    out.push_back(Graph(n, edges));
  }
  return out;
}

Trajectory one_step(const Graph& g, const RewiringAction& a, double reward) {
  Trajectory t;
  t.steps.push_back({g, a, reward, 0.0});
  t.outcome = reward > 0 ? Outcome::Success : Outcome::BudgetExhausted;
  t.budget = 1;
  return t;
}

}  // namespace

TEST_CASE("embedder on an edgeless graph is zero") {
  Rng rng(1);
  const PolicyModel m = init_policy(1, PolicyConfig{}, rng);
  const StateEmbedding e = embed_state(Graph(5, {}), m);
  CHECK(e.nodes.norm() == 0);
  CHECK(e.graph.norm() == 0);
}

TEST_CASE("embedder is permutation equivariant and pooling invariant") {
  Rng rng(2);
  const Graph g = test::random_featured_graph(9, 3, rng);
  const PolicyModel m = init_policy(3, PolicyConfig{}, rng);
  std::vector<int> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const StateEmbedding a = embed_state(g, m);
  const StateEmbedding b = embed_state(test::permute_graph(g, perm), m);
  for (int v = 0; v < 9; ++v) CHECK((a.nodes.row(v) - b.nodes.row(perm[v])).norm() < 1e-12);
  CHECK((a.graph - b.graph).norm() < 1e-12);
}

TEST_CASE("policy gradients match central differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CHECK(test::policy_gradient_error(seed) < 1e-4);
    CHECK(test::policy_gradient_error(seed, ThirdNodeMode::AnyNode) < 1e-4);
  }
}

TEST_CASE("edge distribution: zero head is uniform over admissible edges") {
  Rng rng(3);
  // Triangle 0-1-2 with pendant 3: every edge has an endpoint with a 2-hop node.
  const Graph g(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}});
  const PolicyModel m = zero_head_policy(1, rng);
  const auto d = edge_distribution(g, embed_state(g, m), m, ThirdNodeMode::TwoHop);
  CHECK(d.probs.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(d.probs[i] - 0.25) < 1e-15);

  const auto p3 = edge_distribution(path_graph(3), embed_state(path_graph(3), m), m, ThirdNodeMode::TwoHop);
  CHECK(std::abs(p3.probs.sum() - 1) < 1e-15);
  CHECK(p3.probs.size() == 2);

  const Graph k4 = test::complete_graph(4);
  CHECK_THROWS_AS(edge_distribution(k4, embed_state(k4, m), m, ThirdNodeMode::TwoHop), EmptyActionSpace);
}

TEST_CASE("edge distribution ignores endpoint order") {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const Graph g = test::random_featured_graph(10, 2, rng);
    const PolicyModel m = init_policy(2, PolicyConfig{}, rng);
    const StateEmbedding e = embed_state(g, m);
    std::vector<Edge> reversed;
    for (const auto& edge : g.edges()) reversed.push_back({edge.v, edge.u});
    const auto a = edge_distribution(g, e, m, ThirdNodeMode::TwoHop);
    const auto b = edge_distribution(g, reversed, e, m, ThirdNodeMode::TwoHop);
    CHECK((a.probs - b.probs).cwiseAbs().maxCoeff() == 0);
  }
}

TEST_CASE("first-node distribution masks endpoints without a third node") {
  Rng rng(5);
  const PolicyModel m = zero_head_policy(1, rng);
  const Graph p3 = path_graph(3);
  const StateEmbedding e = embed_state(p3, m);
  const auto d = edge_distribution(p3, e, m, ThirdNodeMode::TwoHop);
  const Vector first = first_node_distribution(p3, {0, 1}, e, d.representations.row(0).transpose(), m,
                                               ThirdNodeMode::TwoHop);
  CHECK(first[0] == 1.0);
  CHECK(first[1] == 0.0);

  const Graph p4 = path_graph(4);
  const StateEmbedding e4 = embed_state(p4, m);
  const auto d4 = edge_distribution(p4, e4, m, ThirdNodeMode::TwoHop);
  const Vector mid = first_node_distribution(p4, {1, 2}, e4, d4.representations.row(1).transpose(), m,
                                             ThirdNodeMode::TwoHop);
  CHECK(mid[0] == 0.5);
  CHECK(mid[1] == 0.5);
}

TEST_CASE("third-node distribution examples") {
  Rng rng(6);
  const PolicyModel m = zero_head_policy(1, rng);
  const Graph p3 = path_graph(3);
  const StateEmbedding e = embed_state(p3, m);
  const auto d = edge_distribution(p3, e, m, ThirdNodeMode::TwoHop);
  const auto single = third_node_distribution(p3, 0, {0, 1}, e, d.representations.row(0).transpose(), m,
                                              ThirdNodeMode::TwoHop);
  CHECK(single.candidates == std::vector<NodeId>{2});
  CHECK(single.probs[0] == 1.0);

  const Graph star = test::star_graph(4);
  const StateEmbedding es = embed_state(star, m);
  const auto ds = edge_distribution(star, es, m, ThirdNodeMode::TwoHop);
  const auto three = third_node_distribution(star, 1, {0, 1}, es, ds.representations.row(0).transpose(), m,
                                             ThirdNodeMode::TwoHop);
  CHECK(three.candidates == std::vector<NodeId>{2, 3, 4});
  for (int i = 0; i < 3; ++i) CHECK(std::abs(three.probs[i] - 1.0 / 3) < 1e-15);
  CHECK_THROWS_AS(third_node_distribution(star, 0, {0, 1}, es, ds.representations.row(0).transpose(), m,
                                          ThirdNodeMode::TwoHop),
                  EmptyActionSpace);

  // Seeded weights on a star-plus-path hybrid give a reproducible simplex.
  const Graph hybrid(7, {{0, 1}, {0, 2}, {0, 3}, {3, 4}, {4, 5}, {5, 6}});
  Rng a(7), b(7);
  const PolicyModel ma = init_policy(1, PolicyConfig{}, a);
  const PolicyModel mb = init_policy(1, PolicyConfig{}, b);
  const auto run = [&](const PolicyModel& pm) {
    const StateEmbedding eh = embed_state(hybrid, pm);
    const auto dh = edge_distribution(hybrid, eh, pm, ThirdNodeMode::TwoHop);
    return third_node_distribution(hybrid, 3, {0, 3}, eh, dh.representations.row(2).transpose(), pm,
                                   ThirdNodeMode::TwoHop);
  };
  const auto ra = run(ma);
  CHECK(ra.candidates == std::vector<NodeId>{1, 2, 5});
  CHECK(std::abs(ra.probs.sum() - 1) < 1e-15);
  CHECK((ra.probs.array() > 0).all());
  CHECK(ra.probs == run(mb).probs);
}

TEST_CASE("sampling on P3 with zero heads") {
  Rng rng(8);
  const PolicyModel m = zero_head_policy(1, rng);
  std::map<RewiringAction, int> counts;
  for (int t = 0; t < 2000; ++t) {
    const ActionSample s = sample_action(path_graph(3), m, ThirdNodeMode::TwoHop, rng);
    ++counts[s.action];
    CHECK(std::abs(s.log_prob - std::log(0.5)) < 1e-15);
  }
  CHECK(counts.size() == 2);
  CHECK(counts[{0, 1, 2}] > 900);
  CHECK(counts[{2, 1, 0}] > 900);
  Rng a(3), b(3);
  CHECK(sample_action(path_graph(5), m, ThirdNodeMode::TwoHop, a).action ==
        sample_action(path_graph(5), m, ThirdNodeMode::TwoHop, b).action);
}

TEST_CASE("sampled actions are always valid and factorise") {
  int trials = 0;
  for (int t = 0; t < 100; ++t) {
    Rng rng(derive_seed(9, "masking", static_cast<std::uint64_t>(t)));
    const Graph g = test::random_featured_graph(6 + static_cast<int>(uniform_index(rng, 10)), 2, rng);
    const PolicyModel m = init_policy(2, PolicyConfig{}, rng);
    for (ThirdNodeMode mode : {ThirdNodeMode::TwoHop, ThirdNodeMode::AnyNode}) {
      if (!has_any_action(g, mode)) continue;
      for (int k = 0; k < 50; ++k) {
        const ActionSample s = sample_action(g, m, mode, rng);
        ++trials;
        CHECK(is_valid_action(g, s.action, mode));
        if (mode == ThirdNodeMode::TwoHop) CHECK(is_valid_rewiring(g, s.action));
        const double product = s.stage_probs[0] * s.stage_probs[1] * s.stage_probs[2];
        CHECK(std::abs(std::exp(s.log_prob) - product) <= 1e-12);
        if (k == 0) CHECK(std::abs(action_log_prob(g, s.action, m, mode, nullptr) - s.log_prob) < 1e-12);
      }
    }
  }
  CHECK(trials >= 10000);
}

TEST_CASE("greedy decoding takes the most probable choice without randomness") {
  Rng rng(10);
  const Graph g = test::random_featured_graph(10, 2, rng);
  const PolicyModel m = init_policy(2, PolicyConfig{}, rng);
  Rng a(1), b(2);
  const ActionSample x = sample_action(g, m, ThirdNodeMode::TwoHop, a, Decoding::Greedy);
  const ActionSample y = sample_action(g, m, ThirdNodeMode::TwoHop, b, Decoding::Greedy);
  CHECK(x.action == y.action);
  CHECK(a() == Rng(1)());
  const auto d = edge_distribution(g, embed_state(g, m), m, ThirdNodeMode::TwoHop);
  CHECK(x.stage_probs[0] == d.probs.maxCoeff());
}

TEST_CASE("reinforce with zero advantages leaves parameters unchanged") {
  Rng rng(11);
  const PolicyModel m = init_policy(1, PolicyConfig{}, rng);
  const Graph g = path_graph(6);
  const auto a = sample_action(g, m, ThirdNodeMode::TwoHop, rng).action;
  const auto r = reinforce_update({one_step(g, a, -0.5), one_step(g, a, -0.5)}, m, {}, ThirdNodeMode::TwoHop);
  CHECK(r.baseline == -0.5);
  CHECK(flatten(r.model.parameters()) == flatten(m.parameters()));
  CHECK_THROWS_AS(reinforce_update({}, m, {}, ThirdNodeMode::TwoHop), InvalidInput);
}

TEST_CASE("a rewarded action becomes more likely") {
  Rng rng(12);
  const PolicyModel m = init_policy(1, PolicyConfig{}, rng);
  const Graph g = test::random_connected_graph(10, 0.2, rng);
  const auto cands = rewiring_candidates(g);
  const RewiringAction good = cands[0];
  const RewiringAction bad = cands[cands.size() - 1];
  const double before = action_log_prob(g, good, m, ThirdNodeMode::TwoHop, nullptr);
  const auto r = reinforce_update({one_step(g, good, 1.0), one_step(g, bad, -1.0)}, m, {}, ThirdNodeMode::TwoHop);
  CHECK(r.baseline == 0);
  CHECK(action_log_prob(g, good, r.model, ThirdNodeMode::TwoHop, nullptr) > before);
}

TEST_CASE("reinforce loss gradient matches central differences and is clipped") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(derive_seed(seed, "reinforce-gradient"));
    const Graph g = test::random_featured_graph(8, 2, rng);
    PolicyConfig cfg;
    cfg.embed_dim = 4;
    const PolicyModel m = init_policy(2, cfg, rng);
    Trajectory two;
    const auto a1 = sample_action(g, m, ThirdNodeMode::TwoHop, rng).action;
    const Graph g2 = apply_rewiring(g, a1);
    const auto a2 = sample_action(g2, m, ThirdNodeMode::TwoHop, rng).action;
    two.steps = {{g, a1, -0.5, 0}, {g2, a2, 1.0, 0}};
    const std::vector<Trajectory> batch{two, one_step(g, a1, -1.0)};
    std::vector<Matrix> grads;
    reinforce_loss(batch, m, ThirdNodeMode::TwoHop, &grads);
    const double err = test::max_block_error(m.parameters(), grads, [&](const std::vector<Matrix>& p) {
      PolicyModel probe = m;
      probe.set_parameters(p);
      return reinforce_loss(batch, probe, ThirdNodeMode::TwoHop, nullptr);
    });
    CHECK(err < 1e-4);

    ReinforceConfig clip;
    clip.learning_rate = 1.0;
    clip.clip_norm = 1.0;
    const auto r = reinforce_update(batch, m, clip, ThirdNodeMode::TwoHop);
    const double step = (flatten(r.model.parameters()) - flatten(m.parameters())).norm();
    CHECK(step <= 1.0 + 1e-12);
    if (r.grad_norm > 1.0) CHECK(std::abs(step - 1.0) < 1e-9);
  }
}

TEST_CASE("an oracle that flips on any rewiring is beaten within two epochs") {
  Rng rng(13);
  std::vector<Graph> graphs;
  for (int i = 0; i < 10; ++i) graphs.push_back(test::random_connected_graph(10, 0.2, rng));
  std::set<std::vector<Edge>> clean;
  for (const auto& g : graphs) clean.insert(g.edges());
  const LabelOracle modified = [clean](const Graph& g) { return clean.count(g.edges()) ? 0 : 1; };
  AttackConfig cfg;
  AttackerTrainConfig hyper;
  hyper.epochs = 2;
  hyper.policy.features = FeatureMode::DegreeBuckets;
  Rng a(1), b(1);
  const auto r1 = train_attacker(graphs, modified, cfg, hyper, a);
  const auto r2 = train_attacker(graphs, modified, cfg, hyper, b);
  CHECK(r1.epoch_success_rate == std::vector<double>{1.0, 1.0});
  CHECK(r1.epoch_success_rate == r2.epoch_success_rate);
  CHECK(flatten(r1.model.parameters()) == flatten(r2.model.parameters()));
}

TEST_CASE("training beats random rewiring against a hub oracle") {
  // The label flips only when node 0 loses one of its 8 edges.
  const LabelOracle hub = [](const Graph& g) { return g.degree(0) < 8 ? 1 : 0; };
  const auto train = hub_graphs(60, 1);
  const auto held_out = hub_graphs(60, 2);
  AttackConfig cfg;
  cfg.budget_mode = BudgetMode::Fixed;
  cfg.fixed_k = 1;
  AttackerTrainConfig hyper;
  hyper.epochs = 20;
  hyper.update.learning_rate = 0.5;
  hyper.policy.features = FeatureMode::DegreeBuckets;
  Rng rng(5);
  const auto r = train_attacker(train, hub, cfg, hyper, rng);
  int policy_wins = 0, random_wins = 0;
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    Rng a(derive_seed(1, "hub-policy", i)), b(derive_seed(1, "hub-random", i));
    policy_wins += run_episode(held_out[i], 0, hub, cfg, policy_chooser(r.model, ThirdNodeMode::TwoHop), a).success();
    random_wins += random_attack(held_out[i], 0, hub, cfg, b).success();
  }
  MESSAGE("hub oracle: policy " << policy_wins << "/60, random " << random_wins << "/60");
  CHECK(policy_wins > 2 * random_wins);
  CHECK(r.epoch_success_rate.back() > r.epoch_success_rate.front());
}
