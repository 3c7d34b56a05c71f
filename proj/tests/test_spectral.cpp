#include <doctest.h>

#include <cmath>

#include "rewire/spectral.hpp"
#include "spectral_checks.hpp"
#include "test_util.hpp"

using namespace rewire;
using rewire::test::complete_graph;
using rewire::test::path_graph;

TEST_CASE("laplacian examples") {
  Matrix p3(3, 3);
  p3 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK(laplacian(path_graph(3)) == p3);
  CHECK(laplacian(Graph(4, {})) == Matrix::Zero(4, 4));
  const Matrix k3 = laplacian(complete_graph(3));
  CHECK(k3 == Matrix::Constant(3, 3, -1) + 3 * Matrix::Identity(3, 3));
  CHECK(k3.rowwise().sum().cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("first_order_shift examples") {
  Rng rng(4);
  const Graph g = test::random_connected_graph(6, 0.3, rng);
  const auto d = laplacian_spectrum(g);
  CHECK(first_order_shift(d, Matrix::Zero(6, 6)).norm() == 0);
  const Vector c = first_order_shift(d, 2.5 * Matrix::Identity(6, 6));
  CHECK((c.array() - 2.5).abs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(first_order_shift(d, Matrix::Zero(5, 5)), InvalidInput);

  const auto cands = rewiring_candidates(g);
  REQUIRE_FALSE(cands.empty());
  const auto a = cands.front();
  CHECK((first_order_shift(d, rewiring_delta_matrix(a, 6)) - rewiring_eig_delta(d, a)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("rewiring_delta_matrix has the six expected entries") {
  const Matrix d = rewiring_delta_matrix({0, 1, 2}, 3);
  Matrix expected(3, 3);
  expected << 0, 1, -1, 1, -1, 0, -1, 0, 1;
  CHECK(d == expected);
  CHECK(d.trace() == 0);
  CHECK_THROWS_AS(rewiring_delta_matrix({0, 1, 3}, 3), InvalidInput);
  // Agrees with the literal Laplacian difference.
  const Graph p4 = path_graph(4);
  CHECK(laplacian(apply_rewiring(p4, {1, 0, 3})) - laplacian(p4) == rewiring_delta_matrix({1, 0, 3}, 4));
}

TEST_CASE("rewiring_eig_delta properties") {
  Rng rng(8);
  const Graph g = test::random_connected_graph(9, 0.25, rng);
  const auto d = laplacian_spectrum(g);
  for (const auto& a : rewiring_candidates(g)) {
    const Vector shift = rewiring_eig_delta(d, a);
    CHECK(std::abs(shift[0]) < 1e-12);
    CHECK(std::abs(shift.sum()) < 1e-9);
  }
  CHECK_THROWS_AS(rewiring_eig_delta(d, {0, 1, 9}), InvalidInput);
}

TEST_CASE("closed-form shift equals the quadratic form over every rewiring") {
  const auto r = test::corollary_check(50, 1);
  CHECK(r.graphs == 50);
  CHECK(r.rewirings > 1000);
  CHECK(r.max_coordinate_error <= 1e-10);
  CHECK(r.max_sum_error <= 1e-9);
}

TEST_CASE("first-order prediction error shrinks quadratically") {
  const auto r = test::first_order_check(20, 1);
  CHECK(r.tested > 100);
  CHECK(r.fraction() >= 0.9);
}

TEST_CASE("algebraic_connectivity examples") {
  for (int n = 2; n <= 7; ++n) CHECK(std::abs(algebraic_connectivity(complete_graph(n)) - n) < 1e-10);
  CHECK(std::abs(algebraic_connectivity(path_graph(3)) - 1) < 1e-12);
  CHECK(std::abs(algebraic_connectivity(Graph(4, {{0, 1}, {2, 3}}))) < 1e-8);
  CHECK_THROWS_AS(algebraic_connectivity(Graph(1, {})), InvalidInput);
}

TEST_CASE("effective_graph_resistance matches the pairwise oracle") {
  CHECK(std::abs(effective_graph_resistance(complete_graph(4)) - 3) < 1e-10);
  for (int n = 2; n <= 8; ++n) {
    const Graph k = complete_graph(n);
    CHECK(std::abs(effective_graph_resistance(k) - (n - 1)) < 1e-10);
    CHECK(std::abs(test::pairwise_resistance_oracle(k) - (n - 1)) < 1e-10);
  }
  // Path on n nodes: pairwise resistance is the hop distance.
  CHECK(std::abs(effective_graph_resistance(path_graph(4)) - 10) < 1e-10);
  for (int t = 0; t < 20; ++t) {
    Rng rng(derive_seed(2, "resistance", static_cast<std::uint64_t>(t)));
    const Graph g = test::random_connected_graph(8, 0.3, rng);
    CHECK(std::abs(effective_graph_resistance(g) - test::pairwise_resistance_oracle(g)) < 1e-8);
  }
  CHECK_THROWS_AS(effective_graph_resistance(Graph(3, {{0, 1}})), DomainError);
}

TEST_CASE("eigenvalue_change_ratio examples") {
  const Graph p3 = path_graph(3);
  for (const auto& r : eigenvalue_change_ratio(p3, p3))
    if (r) CHECK(*r == 0);
  const auto rel = eigenvalue_change_ratio(p3, apply_rewiring(p3, {0, 1, 2}));
  CHECK_FALSE(rel[0].has_value());
  CHECK(std::abs(*rel[1]) < 1e-12);
  CHECK(std::abs(*rel[2]) < 1e-12);
  CHECK_THROWS_AS(eigenvalue_change_ratio(p3, path_graph(4)), InvalidInput);

  Rng rng(10);
  const Graph g = test::random_connected_graph(10, 0.3, rng);
  const auto cands = rewiring_candidates(g);
  const Graph h = apply_rewiring(g, cands[uniform_index(rng, cands.size())]);
  const auto r = eigenvalue_change_ratio(g, h);
  const Vector before = sym_eig<double>(laplacian(g)).eigenvalues;
  const Vector after = sym_eig<double>(laplacian(h)).eigenvalues;
  for (const auto& v : r)
    if (v) CHECK((std::isfinite(*v) && *v >= 0));
  CHECK(std::abs(*r[2] - std::abs(before[2] - after[2]) / before[2]) < 1e-12);
}

TEST_CASE("spectral_report fields") {
  const auto r = spectral_report(complete_graph(4), RewiringAction{});
  CHECK(r.zero_eigenvalues == 1);
  CHECK(std::abs(r.algebraic_connectivity - 4) < 1e-10);
  CHECK(std::abs(*r.effective_resistance - 3) < 1e-10);
  CHECK(r.predicted_shift.size() == 4);
  const auto split = spectral_report(Graph(4, {{0, 1}, {2, 3}}));
  CHECK(split.zero_eigenvalues == 2);
  CHECK_FALSE(split.effective_resistance.has_value());
}

TEST_CASE("two-hop rewiring moves the Fiedler value less than long-range additions") {
  double rewire_sum = 0, add_sum = 0;
  int rewire_count = 0, add_count = 0;
  for (int t = 0; t < 30; ++t) {
    Rng rng(derive_seed(3, "fiedler", static_cast<std::uint64_t>(t)));
    const Graph g = test::random_connected_graph(16, 0.2, rng);
    const double l2 = algebraic_connectivity(g);
    for (const auto& a : rewiring_candidates(g)) {
      rewire_sum += std::abs(algebraic_connectivity(apply_rewiring(g, a)) - l2);
      ++rewire_count;
    }
    // Additions between nodes at distance at least 3.
    for (int u = 0; u < g.num_nodes(); ++u) {
      for (int v = u + 1; v < g.num_nodes(); ++v) {
        const auto one = k_hop_neighbors(g, u, 1);
        const auto two = k_hop_neighbors(g, u, 2);
        if (std::find(one.begin(), one.end(), v) != one.end() || std::find(two.begin(), two.end(), v) != two.end())
          continue;
        std::vector<Edge> edges = g.edges();
        edges.push_back({u, v});
        add_sum += std::abs(algebraic_connectivity(g.with_edges(edges)) - l2);
        ++add_count;
      }
    }
  }
  REQUIRE(rewire_count > 0);
  REQUIRE(add_count > 0);
  CHECK(rewire_sum / rewire_count <= add_sum / add_count);
}
