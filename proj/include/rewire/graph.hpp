#ifndef REWIRE_GRAPH_HPP
#define REWIRE_GRAPH_HPP

#include <compare>
#include <optional>
#include <vector>

#include "rewire/numeric.hpp"
#include "rewire/random.hpp"

namespace rewire {

using NodeId = int;

/// Undirected edge stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Delete (fir, sec), add (fir, thi).
struct RewiringAction {
  NodeId fir = 0;
  NodeId sec = 0;
  NodeId thi = 0;
  auto operator<=>(const RewiringAction&) const = default;
};

/// Which nodes may serve as the third node of a rewiring. TwoHop is the
/// exact-distance-2 rule; AnyNode admits every node that is neither the
/// first node nor already adjacent to it.
enum class ThirdNodeMode { TwoHop, AnyNode };

/// Immutable undirected simple graph with node features and an optional
/// class label. Node ids are dense and 0-based.
class Graph {
 public:
  Graph() = default;
  /// Throws InvalidInput on self-loops, duplicate edges, out-of-range ids or
  /// a feature matrix whose row count differs from num_nodes. An empty
  /// feature matrix is replaced by a constant-one column.
  Graph(int num_nodes, std::vector<Edge> edges, Matrix features = {}, std::optional<int> label = {});

  int num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<NodeId>& neighbors(NodeId v) const;
  int degree(NodeId v) const { return static_cast<int>(neighbors(v).size()); }
  bool has_edge(NodeId a, NodeId b) const;
  /// Dense symmetric 0/1 adjacency, built on demand.
  Matrix adjacency() const;
  const Matrix& features() const { return features_; }
  std::optional<int> label() const { return label_; }

  Graph with_label(std::optional<int> label) const;
  Graph with_features(Matrix features) const;
  Graph with_edges(std::vector<Edge> edges) const;

  bool operator==(const Graph& other) const;

 private:
  void check_node(NodeId v) const;

  int num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adj_;
  Matrix features_;
  std::optional<int> label_;
};

Edge make_edge(NodeId a, NodeId b);

/// Nodes at shortest-path distance exactly k from v, ascending.
std::vector<NodeId> k_hop_neighbors(const Graph& g, NodeId v, int k);

bool is_valid_rewiring(const Graph& g, const RewiringAction& a);
bool is_valid_action(const Graph& g, const RewiringAction& a, ThirdNodeMode mode);

/// Admissible third nodes for first node `fir`, ascending. Depends only on
/// `fir`, never on the deleted neighbour.
std::vector<NodeId> third_node_candidates(const Graph& g, NodeId fir, ThirdNodeMode mode);

/// All valid rewirings, sorted by (fir, sec, thi).
std::vector<RewiringAction> rewiring_candidates(const Graph& g);
std::vector<RewiringAction> action_candidates(const Graph& g, ThirdNodeMode mode);
bool has_any_action(const Graph& g, ThirdNodeMode mode);

/// Throws RejectedAction when `a` is not valid under `mode`.
Graph apply_rewiring(const Graph& g, const RewiringAction& a, ThirdNodeMode mode = ThirdNodeMode::TwoHop);

struct Components {
  int count = 0;
  std::vector<int> component_of;          // per node
  std::vector<std::vector<NodeId>> members;  // per component, ascending
};

Components connected_components(const Graph& g);

struct AddDeleteResult {
  Graph graph;
  int applied = 0;
};

/// Applies `count` random edge deletions or additions (each a fair coin),
/// falling back to the other type when the drawn one is impossible and
/// stopping early when neither is.
AddDeleteResult random_add_delete(const Graph& g, int count, Rng& rng);

}  // namespace rewire

#endif  // REWIRE_GRAPH_HPP
