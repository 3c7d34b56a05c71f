#ifndef REWIRE_CLASSIFIER_HPP
#define REWIRE_CLASSIFIER_HPP

#include <functional>
#include <memory>
#include <vector>

#include "rewire/features.hpp"
#include "rewire/graph.hpp"
#include "rewire/layers.hpp"
#include "rewire/numeric.hpp"
#include "rewire/oracle.hpp"
#include "rewire/random.hpp"

namespace rewire {

struct ClassifierConfig {
  int num_layers = 3;
  int hidden_dim = 32;
  int mlp_hidden_dim = 32;
  bool self_loops = false;
  FeatureMode features = FeatureMode::Stored;
};

/// GCN graph classifier: J graph convolutions, max pooling, MLP head.
struct ClassifierModel {
  ClassifierConfig config;
  int input_dim = 0;
  int num_classes = 0;
  std::vector<Matrix> layer_weights;  // W^1 ... W^J
  Mlp head;

  /// Throws InvalidInput unless every dimension chains and the head emits num_classes logits.
  void validate() const;
  std::vector<Matrix> parameters() const;
  void set_parameters(const std::vector<Matrix>& params);
};

ClassifierModel init_classifier(int input_dim, int num_classes, const ClassifierConfig& cfg, Rng& rng);

struct Prediction {
  int label = 0;
  Vector logits;  // post-softmax class distribution
  Vector graph_embedding;
};

/// Node embeddings after the last graph convolution.
Matrix gcn_forward(const Graph& g, const ClassifierModel& model);
/// Max pooling over node embeddings.
Vector graph_embedding(const Matrix& f);
Prediction predict(const Graph& g, const ClassifierModel& model);

/// Label-only view of a model. Attackers receive this and nothing else.
LabelOracle make_label_oracle(std::shared_ptr<const ClassifierModel> model);

/// Cross-entropy of one labelled graph; fills `grads` (same layout as
/// parameters()) when non-null.
double classifier_loss(const Graph& g, int label, const ClassifierModel& model, std::vector<Matrix>* grads);
double classifier_loss(const Matrix& ahat, const Graph& g, int label, const ClassifierModel& model,
                       std::vector<Matrix>* grads);

struct ClassifierTrainConfig {
  int epochs = 200;
  int batch_size = 16;
  double learning_rate = 0.01;
  double momentum = 0.9;  // 0 disables momentum
};

struct ClassifierTrainResult {
  ClassifierModel model;
  std::vector<double> epoch_loss;
  std::vector<double> epoch_accuracy;
};

/// Mini-batch gradient descent on mean cross-entropy. Throws InvalidInput
/// when fewer than two classes are present or feature widths differ.
ClassifierTrainResult train_classifier(const std::vector<Graph>& dataset, const ClassifierConfig& cfg,
                                       const ClassifierTrainConfig& hyper, Rng& rng);

double accuracy(const std::vector<Graph>& graphs, const ClassifierModel& model);

/// ||u_a - u_o|| / ||u_o||; DomainError when u_o is zero.
double relative_embedding_change(const Vector& original, const Vector& attacked);

}  // namespace rewire

#endif  // REWIRE_CLASSIFIER_HPP
