#include <doctest.h>

#include <algorithm>
#include <set>

#include "rewire/graph.hpp"
#include "test_util.hpp"

using namespace rewire;
using rewire::test::complete_graph;
using rewire::test::path_graph;
using rewire::test::star_graph;

namespace {

int degree_sum(const Graph& g) {
  int s = 0;
  for (int v = 0; v < g.num_nodes(); ++v) s += g.degree(v);
  return s;
}

// Distances by Floyd-Warshall, the oracle for exact-distance neighbourhoods.
std::vector<std::vector<int>> all_distances(const Graph& g) {
  const int n = g.num_nodes();
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

}  // namespace

TEST_CASE("graph construction validates input") {
  CHECK_THROWS_AS(Graph(3, {{0, 0}}), InvalidInput);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), InvalidInput);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), InvalidInput);
  CHECK_THROWS_AS(Graph(2, {{0, 1}}, Matrix::Ones(3, 1)), InvalidInput);
  const Graph g(3, {{2, 0}});
  CHECK(g.edges().front() == Edge{0, 2});
  CHECK(g.features().rows() == 3);
  CHECK(g.features().cols() == 1);
  CHECK(g.has_edge(2, 0));
  CHECK_FALSE(g.has_edge(1, 0));
}

TEST_CASE("k_hop_neighbors examples") {
  const Graph star = star_graph(4);
  CHECK(k_hop_neighbors(star, 1, 1) == std::vector<NodeId>{0});
  CHECK(k_hop_neighbors(star, 1, 2) == std::vector<NodeId>{2, 3, 4});
  CHECK(k_hop_neighbors(path_graph(3), 0, 2) == std::vector<NodeId>{2});
  const Graph isolated(3, {{1, 2}});
  CHECK(k_hop_neighbors(isolated, 0, 1).empty());
  CHECK(k_hop_neighbors(isolated, 0, 2).empty());
  CHECK_THROWS_AS(k_hop_neighbors(isolated, 3, 1), InvalidInput);
}

TEST_CASE("is_valid_rewiring examples") {
  const Graph p3 = path_graph(3);
  CHECK(is_valid_rewiring(p3, {0, 1, 2}));
  CHECK_FALSE(is_valid_rewiring(p3, {1, 0, 2}));
  const Graph tri = complete_graph(3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) CHECK_FALSE(is_valid_rewiring(tri, {a, b, c}));
}

TEST_CASE("rewiring_candidates examples") {
  const auto p3 = rewiring_candidates(path_graph(3));
  CHECK(p3 == std::vector<RewiringAction>{{0, 1, 2}, {2, 1, 0}});
  CHECK(rewiring_candidates(complete_graph(4)).empty());
  CHECK(rewiring_candidates(Graph(5, {})).empty());
}

TEST_CASE("apply_rewiring examples") {
  const Graph p4 = path_graph(4);
  const Graph r = apply_rewiring(p4, {1, 0, 3});
  CHECK(r.edges() == std::vector<Edge>{{1, 2}, {1, 3}, {2, 3}});
  CHECK(r.degree(0) == 0);
  CHECK(degree_sum(r) == 6);
  CHECK(connected_components(r).count == 2);

  const Graph p3 = apply_rewiring(path_graph(3), {0, 1, 2});
  CHECK(p3.edges() == std::vector<Edge>{{0, 2}, {1, 2}});

  CHECK_THROWS_AS(apply_rewiring(path_graph(3), {1, 0, 2}), RejectedAction);
}

TEST_CASE("ReWatt-a admits any non-adjacent third node") {
  const Graph p4 = path_graph(4);
  CHECK(third_node_candidates(p4, 0, ThirdNodeMode::AnyNode) == std::vector<NodeId>{2, 3});
  CHECK(third_node_candidates(p4, 0, ThirdNodeMode::TwoHop) == std::vector<NodeId>{2});
  CHECK(is_valid_action(p4, {0, 1, 3}, ThirdNodeMode::AnyNode));
  CHECK_FALSE(is_valid_action(p4, {0, 1, 3}, ThirdNodeMode::TwoHop));
  const Graph r = apply_rewiring(p4, {0, 1, 3}, ThirdNodeMode::AnyNode);
  CHECK(r.has_edge(0, 3));
  CHECK_FALSE(r.has_edge(0, 1));
}

TEST_CASE("connected_components examples") {
  CHECK(connected_components(path_graph(4)).count == 1);
  CHECK(connected_components(Graph(5, {})).count == 5);
  const Components c = connected_components(Graph(5, {{0, 4}, {1, 2}}));
  CHECK(c.count == 3);
  CHECK(c.component_of[0] == c.component_of[4]);
  CHECK(c.members[0] == std::vector<NodeId>{0, 4});
}

TEST_CASE("rewiring invariants over randomized cases") {
  int applied = 0;
  for (int t = 0; t < 1000; ++t) {
    Rng rng(derive_seed(5, "rewire-invariants", static_cast<std::uint64_t>(t)));
    const int n = 3 + static_cast<int>(uniform_index(rng, 18));
    const Graph g = test::random_graph(n, 0.1 + 0.5 * std::uniform_real_distribution<double>()(rng), rng);
    const auto cands = rewiring_candidates(g);
    if (cands.empty()) continue;
    const RewiringAction a = cands[uniform_index(rng, cands.size())];
    const Graph r = apply_rewiring(g, a);
    ++applied;
    CHECK(r.num_nodes() == g.num_nodes());
    CHECK(r.num_edges() == g.num_edges());
    CHECK(degree_sum(r) == degree_sum(g));
    std::set<Edge> seen;
    for (const auto& e : r.edges()) {
      CHECK(e.u < e.v);
      CHECK(seen.insert(e).second);
    }
    CHECK(r.has_edge(a.fir, a.thi));
    CHECK_FALSE(r.has_edge(a.fir, a.sec));
    // The inverse move, when itself valid, restores the original edge set.
    const RewiringAction inverse{a.fir, a.thi, a.sec};
    if (is_valid_rewiring(r, inverse)) CHECK(apply_rewiring(r, inverse).edges() == g.edges());
  }
  CHECK(applied > 900);
}

TEST_CASE("k-hop sets are exact distances and disjoint") {
  for (int t = 0; t < 50; ++t) {
    Rng rng(derive_seed(5, "k-hop", static_cast<std::uint64_t>(t)));
    const Graph g = test::random_graph(10, 0.25, rng);
    const auto d = all_distances(g);
    for (int v = 0; v < g.num_nodes(); ++v) {
      const auto one = k_hop_neighbors(g, v, 1);
      const auto two = k_hop_neighbors(g, v, 2);
      for (int k : {1, 2, 3}) {
        std::vector<NodeId> expected;
        for (int u = 0; u < g.num_nodes(); ++u)
          if (d[v][u] == k) expected.push_back(u);
        CHECK(k_hop_neighbors(g, v, k) == expected);
      }
      for (NodeId u : one) CHECK(std::find(two.begin(), two.end(), u) == two.end());
    }
  }
}

TEST_CASE("rewiring_candidates is exhaustive against brute-force enumeration") {
  for (int t = 0; t < 200; ++t) {
    Rng rng(derive_seed(5, "brute-force", static_cast<std::uint64_t>(t)));
    const int n = 2 + static_cast<int>(uniform_index(rng, 7));
    const Graph g = test::random_graph(n, 0.4, rng);
    const auto d = all_distances(g);
    std::vector<RewiringAction> brute;
    for (int f = 0; f < n; ++f)
      for (int s = 0; s < n; ++s)
        for (int h = 0; h < n; ++h)
          if (d[f][s] == 1 && d[f][h] == 2) brute.push_back({f, s, h});
    const auto cands = rewiring_candidates(g);
    CHECK(cands == brute);
    for (const auto& a : cands) CHECK(is_valid_rewiring(g, a));
    CHECK(has_any_action(g, ThirdNodeMode::TwoHop) == !brute.empty());
  }
}

TEST_CASE("random_add_delete examples") {
  Rng rng(1);
  const Graph p = path_graph(4);
  CHECK(random_add_delete(p, 0, rng).graph == p);
  for (int t = 0; t < 20; ++t) {
    const auto r = random_add_delete(p, 1, rng);
    CHECK(r.applied == 1);
    CHECK((r.graph.num_edges() == 2 || r.graph.num_edges() == 4));
  }
  Rng a(9), b(9);
  CHECK(random_add_delete(p, 5, a).graph == random_add_delete(p, 5, b).graph);

  // Only deletion is possible on K_4, only addition on an edgeless graph.
  Rng c(2);
  CHECK(random_add_delete(complete_graph(4), 1, c).graph.num_edges() == 5);
  CHECK(random_add_delete(Graph(4, {}), 1, c).graph.num_edges() == 1);
  // A single node admits neither operation, so the count stops early.
  const auto stuck = random_add_delete(Graph(1, {}), 3, c);
  CHECK(stuck.applied == 0);
  CHECK_THROWS_AS(random_add_delete(p, -1, c), InvalidInput);
}
