#ifndef REWIRE_POLICY_HPP
#define REWIRE_POLICY_HPP

#include <array>
#include <span>
#include <vector>

#include "rewire/attack_env.hpp"
#include "rewire/features.hpp"
#include "rewire/graph.hpp"
#include "rewire/layers.hpp"
#include "rewire/oracle.hpp"
#include "rewire/random.hpp"

namespace rewire {

struct PolicyConfig {
  int embed_dim = 32;
  bool self_loops = false;
  FeatureMode features = FeatureMode::Stored;
  /// Represent third-node candidates with the chosen first node's row
  /// instead of the first endpoint of the sampled edge.
  bool third_uses_first_node = false;
  /// Zero the output layer of every head so all three stages start uniform.
  bool zero_init_heads = false;
};

/// Attacker policy: a 2-layer GCN state embedder and three MLP heads that
/// score edges, the first node of the chosen edge and candidate third nodes.
struct PolicyModel {
  PolicyConfig config;
  int input_dim = 0;
  std::vector<Matrix> embedder;  // two GCN layers
  Mlp edge_head;   // input 2 * embed_dim
  Mlp first_head;  // input 3 * embed_dim
  Mlp third_head;  // input 4 * embed_dim

  int embed_dim() const { return static_cast<int>(embedder.empty() ? 0 : embedder.back().cols()); }
  void validate() const;
  std::vector<Matrix> parameters() const;
  void set_parameters(const std::vector<Matrix>& params);
};

PolicyModel init_policy(int input_dim, const PolicyConfig& cfg, Rng& rng);

struct StateEmbedding {
  Matrix nodes;  // |V| x d_F
  Vector graph;  // max pooled
};

StateEmbedding embed_state(const Graph& g, const PolicyModel& model);

struct EdgeDistribution {
  std::vector<Edge> edges;        // in the order scored
  std::vector<bool> admissible;   // edge admits at least one full action
  Vector probs;                   // zero on inadmissible edges
  Matrix representations;         // |E| x 2 d_F
};

/// Masked softmax over edges. Throws EmptyActionSpace when no edge admits a
/// valid rewiring.
EdgeDistribution edge_distribution(const Graph& g, const StateEmbedding& emb, const PolicyModel& model,
                                   ThirdNodeMode mode);
EdgeDistribution edge_distribution(const Graph& g, std::span<const Edge> edges, const StateEmbedding& emb,
                                   const PolicyModel& model, ThirdNodeMode mode);

/// Probabilities of the edge's two stored endpoints serving as the first node.
Vector first_node_distribution(const Graph& g, const Edge& edge, const StateEmbedding& emb,
                               const Vector& edge_representation, const PolicyModel& model, ThirdNodeMode mode);

struct ThirdNodeDistribution {
  std::vector<NodeId> candidates;
  Vector probs;
};

ThirdNodeDistribution third_node_distribution(const Graph& g, NodeId fir, const Edge& edge, const StateEmbedding& emb,
                                              const Vector& edge_representation, const PolicyModel& model,
                                              ThirdNodeMode mode);

struct ActionSample {
  RewiringAction action;
  double log_prob = 0;
  std::array<double, 3> stage_probs{};  // edge, first node, third node
};

/// Sample draws every stage from its distribution; Greedy takes each stage's
/// most probable entry (lowest index on ties) and consumes no randomness.
enum class Decoding { Sample, Greedy };

ActionSample sample_action(const Graph& g, const PolicyModel& model, ThirdNodeMode mode, Rng& rng,
                           Decoding decoding = Decoding::Sample);

/// log pi(action | g) under the three-stage factorisation; fills `grads`
/// (layout of parameters()) when non-null.
double action_log_prob(const Graph& g, const RewiringAction& action, const PolicyModel& model, ThirdNodeMode mode,
                       std::vector<Matrix>* grads);

ActionChooser policy_chooser(const PolicyModel& model, ThirdNodeMode mode, Decoding decoding = Decoding::Sample);

/// -sum_episodes sum_t log pi(a_t|s_t) * (G_t - b) with undiscounted
/// return-to-go G_t and b the mean of G_t over every step in the batch.
double reinforce_loss(const std::vector<Trajectory>& batch, const PolicyModel& model, ThirdNodeMode mode,
                      std::vector<Matrix>* grads);

struct ReinforceConfig {
  double learning_rate = 0.05;
  double clip_norm = 1.0;
};

struct ReinforceResult {
  PolicyModel model;
  double loss = 0;
  double grad_norm = 0;  // before clipping
  double baseline = 0;
  int steps = 0;
};

/// One clipped gradient step on reinforce_loss.
ReinforceResult reinforce_update(const std::vector<Trajectory>& batch, const PolicyModel& model,
                                 const ReinforceConfig& cfg, ThirdNodeMode mode);

struct AttackerTrainConfig {
  int epochs = 20;
  int batch_episodes = 8;
  ReinforceConfig update;
  PolicyConfig policy;
};

struct AttackerTrainResult {
  PolicyModel model;
  std::vector<double> epoch_success_rate;
};

AttackerTrainResult train_attacker(const std::vector<Graph>& train_graphs, const LabelOracle& oracle,
                                   const AttackConfig& cfg, const AttackerTrainConfig& hyper, Rng& rng);

}  // namespace rewire

#endif  // REWIRE_POLICY_HPP
