#include "rewire/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace rewire {

Edge make_edge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

Graph::Graph(int num_nodes, std::vector<Edge> edges, Matrix features, std::optional<int> label)
    : num_nodes_(num_nodes), label_(label) {
  if (num_nodes < 0) throw InvalidInput("Graph: negative node count");
  for (auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes)
      throw InvalidInput("Graph: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         ") out of range for " + std::to_string(num_nodes) + " nodes");
    if (e.u == e.v) throw InvalidInput("Graph: self-loop at node " + std::to_string(e.u));
    e = make_edge(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw InvalidInput("Graph: duplicate edge");
  edges_ = std::move(edges);

  adj_.assign(static_cast<std::size_t>(num_nodes), {});
  for (const auto& e : edges_) {
    adj_[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj_[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  for (auto& list : adj_) std::sort(list.begin(), list.end());

  if (features.size() == 0 && features.rows() == 0)
    features_ = Matrix::Ones(num_nodes, 1);
  else
    features_ = std::move(features);
  if (features_.rows() != num_nodes)
    throw InvalidInput("Graph: feature matrix has " + std::to_string(features_.rows()) + " rows for " +
                       std::to_string(num_nodes) + " nodes");
}

void Graph::check_node(NodeId v) const {
  if (v < 0 || v >= num_nodes_)
    throw InvalidInput("node id " + std::to_string(v) + " out of range [0," + std::to_string(num_nodes_) + ")");
}

const std::vector<NodeId>& Graph::neighbors(NodeId v) const {
  check_node(v);
  return adj_[static_cast<std::size_t>(v)];
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  const auto& list = neighbors(a);
  check_node(b);
  return std::binary_search(list.begin(), list.end(), b);
}

Matrix Graph::adjacency() const {
  Matrix a = Matrix::Zero(num_nodes_, num_nodes_);
  for (const auto& e : edges_) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

Graph Graph::with_label(std::optional<int> label) const {
  Graph g = *this;
  g.label_ = label;
  return g;
}

Graph Graph::with_features(Matrix features) const { return Graph(num_nodes_, edges_, std::move(features), label_); }

Graph Graph::with_edges(std::vector<Edge> edges) const { return Graph(num_nodes_, std::move(edges), features_, label_); }

bool Graph::operator==(const Graph& other) const {
  return num_nodes_ == other.num_nodes_ && edges_ == other.edges_ && label_ == other.label_ &&
         features_.rows() == other.features_.rows() && features_.cols() == other.features_.cols() &&
         features_ == other.features_;
}

namespace {

// BFS distances from v, truncated at max_depth (-1 = unreached).
std::vector<int> distances_from(const Graph& g, NodeId v, int max_depth) {
  std::vector<int> dist(static_cast<std::size_t>(g.num_nodes()), -1);
  dist[static_cast<std::size_t>(v)] = 0;
  std::queue<NodeId> frontier;
  frontier.push(v);
  while (!frontier.empty()) {
    const NodeId x = frontier.front();
    frontier.pop();
    const int d = dist[static_cast<std::size_t>(x)];
    if (d == max_depth) continue;
    for (NodeId y : g.neighbors(x)) {
      if (dist[static_cast<std::size_t>(y)] < 0) {
        dist[static_cast<std::size_t>(y)] = d + 1;
        frontier.push(y);
      }
    }
  }
  return dist;
}

void check_action_ids(const Graph& g, const RewiringAction& a) {
  for (NodeId id : {a.fir, a.sec, a.thi})
    if (id < 0 || id >= g.num_nodes())
      throw InvalidInput("rewiring action id " + std::to_string(id) + " out of range");
}

}  // namespace

std::vector<NodeId> k_hop_neighbors(const Graph& g, NodeId v, int k) {
  if (v < 0 || v >= g.num_nodes()) throw InvalidInput("k_hop_neighbors: node out of range");
  if (k < 1) throw InvalidInput("k_hop_neighbors: k must be at least 1");
  const auto dist = distances_from(g, v, k);
  std::vector<NodeId> out;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (dist[static_cast<std::size_t>(u)] == k) out.push_back(u);
  return out;
}

std::vector<NodeId> third_node_candidates(const Graph& g, NodeId fir, ThirdNodeMode mode) {
  if (mode == ThirdNodeMode::TwoHop) return k_hop_neighbors(g, fir, 2);
  std::vector<NodeId> out;
  const auto& nbrs = g.neighbors(fir);
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (u != fir && !std::binary_search(nbrs.begin(), nbrs.end(), u)) out.push_back(u);
  return out;
}

bool is_valid_action(const Graph& g, const RewiringAction& a, ThirdNodeMode mode) {
  check_action_ids(g, a);
  if (a.fir == a.sec || a.fir == a.thi || a.sec == a.thi) return false;
  if (!g.has_edge(a.fir, a.sec)) return false;
  if (mode == ThirdNodeMode::AnyNode) return !g.has_edge(a.fir, a.thi);
  const auto dist = distances_from(g, a.fir, 2);
  return dist[static_cast<std::size_t>(a.thi)] == 2;
}

bool is_valid_rewiring(const Graph& g, const RewiringAction& a) {
  return is_valid_action(g, a, ThirdNodeMode::TwoHop);
}

std::vector<RewiringAction> action_candidates(const Graph& g, ThirdNodeMode mode) {
  std::vector<RewiringAction> out;
  for (NodeId fir = 0; fir < g.num_nodes(); ++fir) {
    const auto& nbrs = g.neighbors(fir);
    if (nbrs.empty()) continue;
    const auto thirds = third_node_candidates(g, fir, mode);
    for (NodeId sec : nbrs)
      for (NodeId thi : thirds) out.push_back({fir, sec, thi});
  }
  return out;
}

std::vector<RewiringAction> rewiring_candidates(const Graph& g) {
  return action_candidates(g, ThirdNodeMode::TwoHop);
}

bool has_any_action(const Graph& g, ThirdNodeMode mode) {
  for (NodeId fir = 0; fir < g.num_nodes(); ++fir)
    if (!g.neighbors(fir).empty() && !third_node_candidates(g, fir, mode).empty()) return true;
  return false;
}

Graph apply_rewiring(const Graph& g, const RewiringAction& a, ThirdNodeMode mode) {
  if (!is_valid_action(g, a, mode))
    throw RejectedAction("rewiring (" + std::to_string(a.fir) + "," + std::to_string(a.sec) + "," +
                         std::to_string(a.thi) + ") is not valid for this graph");
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  const Edge removed = make_edge(a.fir, a.sec);
  for (const auto& e : g.edges())
    if (e != removed) edges.push_back(e);
  edges.push_back(make_edge(a.fir, a.thi));
  return g.with_edges(std::move(edges));
}

Components connected_components(const Graph& g) {
  Components c;
  c.component_of.assign(static_cast<std::size_t>(g.num_nodes()), -1);
  for (NodeId start = 0; start < g.num_nodes(); ++start) {
    if (c.component_of[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = c.count++;
    c.members.emplace_back();
    std::vector<NodeId> stack{start};
    c.component_of[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const NodeId x = stack.back();
      stack.pop_back();
      c.members.back().push_back(x);
      for (NodeId y : g.neighbors(x)) {
        if (c.component_of[static_cast<std::size_t>(y)] < 0) {
          c.component_of[static_cast<std::size_t>(y)] = id;
          stack.push_back(y);
        }
      }
    }
    std::sort(c.members.back().begin(), c.members.back().end());
  }
  return c;
}

namespace {

std::optional<Edge> random_absent_pair(const Graph& g, Rng& rng) {
  const long long n = g.num_nodes();
  const long long total = n * (n - 1) / 2;
  const long long absent = total - static_cast<long long>(g.num_edges());
  if (absent <= 0) return std::nullopt;
  if (absent * 4 >= total) {
    // Sparse enough that rejection sampling terminates quickly.
    for (;;) {
      const auto a = static_cast<NodeId>(uniform_index(rng, static_cast<std::size_t>(n)));
      const auto b = static_cast<NodeId>(uniform_index(rng, static_cast<std::size_t>(n)));
      if (a != b && !g.has_edge(a, b)) return make_edge(a, b);
    }
  }
  auto pick = static_cast<long long>(uniform_index(rng, static_cast<std::size_t>(absent)));
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      if (!g.has_edge(a, b) && pick-- == 0) return Edge{a, b};
  return std::nullopt;
}

}  // namespace

AddDeleteResult random_add_delete(const Graph& g, int count, Rng& rng) {
  if (count < 0) throw InvalidInput("random_add_delete: negative count");
  AddDeleteResult out{g, 0};
  std::bernoulli_distribution coin(0.5);
  for (int step = 0; step < count; ++step) {
    const Graph& cur = out.graph;
    const long long n = cur.num_nodes();
    const bool can_delete = cur.num_edges() > 0;
    const bool can_add = static_cast<long long>(cur.num_edges()) < n * (n - 1) / 2;
    if (!can_delete && !can_add) break;
    bool del = coin(rng);
    if (del && !can_delete) del = false;
    if (!del && !can_add) del = true;
    std::vector<Edge> edges = cur.edges();
    if (del) {
      edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, edges.size())));
    } else {
      edges.push_back(*random_absent_pair(cur, rng));
    }
    out.graph = cur.with_edges(std::move(edges));
    ++out.applied;
  }
  return out;
}

}  // namespace rewire
