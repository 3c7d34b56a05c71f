#include <doctest.h>

#include <cmath>

#include "rewire/analysis.hpp"
#include "rewire/classifier.hpp"
#include "rewire/features.hpp"
#include "spectral_checks.hpp"
#include "test_util.hpp"

using namespace rewire;

namespace {

Vector random_simplex(int n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = e(rng);
  return v / v.sum();
}

}  // namespace

TEST_CASE("kl_logits examples") {
  const Vector p = (Vector(3) << 0.2, 0.3, 0.5).finished();
  CHECK(kl_logits(p, p) == 0.0);
  const Vector one_hot = (Vector(2) << 1, 0).finished();
  const Vector half = (Vector(2) << 0.5, 0.5).finished();
  CHECK(std::abs(kl_logits(one_hot, half) - std::log(2.0)) < 1e-15);
  // p_a is floored, so a hard miss stays finite.
  CHECK(std::isfinite(kl_logits(half, one_hot)));
  CHECK_THROWS_AS(kl_logits(p, half), InvalidInput);
}

TEST_CASE("kl_logits is nonnegative on random simplex pairs") {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 6));
    const Vector p = random_simplex(n, rng);
    const Vector q = random_simplex(n, rng);
    CHECK(kl_logits(p, q) >= 0.0);
    CHECK(kl_logits(p, p) == 0.0);
  }
}

TEST_CASE("analyze_attack on zero-step and successful episodes") {
  Rng rng(2);
  ClassifierConfig cfg;
  cfg.features = FeatureMode::DegreeBuckets;
  const auto model = std::make_shared<ClassifierModel>(init_classifier(kDegreeBuckets, 3, cfg, rng));
  const LabelOracle oracle = make_label_oracle(model);
  const Graph g = test::random_connected_graph(14, 0.2, rng);

  Trajectory empty;
  empty.outcome = Outcome::NoValidAction;
  empty.final_graph = g;
  const auto zero = analyze_attack("g0", g, empty, *model);
  CHECK(zero.rc == 0.0);
  CHECK(zero.kl == 0.0);
  CHECK(zero.steps == 0);
  CHECK(zero.components_before == zero.components_after);

  // Search seeded random attacks until one flips the label.
  AttackConfig attack;
  attack.budget_mode = BudgetMode::Fixed;
  attack.fixed_k = 6;
  const int label = oracle(g);
  bool found = false;
  for (int t = 0; t < 300 && !found; ++t) {
    Rng ep(derive_seed(2, "analysis-attack", static_cast<std::uint64_t>(t)));
    const Trajectory tr = random_attack(g, label, oracle, attack, ep);
    const auto rec = analyze_attack("g0", g, tr, *model);
    CHECK(std::isfinite(rec.rc));
    CHECK(std::isfinite(rec.kl));
    CHECK(rec.kl >= 0);
    CHECK(rec.step_ratio == doctest::Approx(static_cast<double>(tr.num_steps()) / g.num_edges()));
    CHECK(rec.r_lambda.size() == static_cast<std::size_t>(g.num_nodes()));
    if (tr.success()) {
      found = true;
      CHECK(rec.attacked_label != rec.original_label);
      CHECK(rec.outcome == Outcome::Success);
      const auto again = analyze_attack("g0", g, tr, *model);
      CHECK(again.rc == rec.rc);
      CHECK(again.kl == rec.kl);
    }
  }
  CHECK(found);
}

TEST_CASE("compare_operators with no recorded steps yields an empty report") {
  Rng rng(3);
  const Graph g = test::random_connected_graph(10, 0.2, rng);
  const auto r = compare_operators({{"a", g, g, 0}, {"b", g, g, 0}}, rng);
  CHECK(r.graphs_used == 0);
  CHECK(r.ratio.empty());
  CHECK_THROWS_AS(compare_operators({}, rng), InvalidInput);
}

TEST_CASE("compare_operators matches operation counts and shows the spectral direction") {
  const auto r = test::operator_direction_check(30, 2, 1);
  CHECK(r.graphs_used == 30);
  for (int applied : r.add_delete_applied) CHECK(applied == 2);
  CHECK(r.fraction_ratio_above_one() > 0.5);
  CHECK(r.mean_components_rewired <= r.mean_components_add_delete);
  CHECK(r.mean_r_rewire.size() == r.ratio.size());
}
