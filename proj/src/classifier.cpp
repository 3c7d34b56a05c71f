#include "rewire/classifier.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

namespace rewire {

void ClassifierModel::validate() const {
  if (num_classes < 1) throw InvalidInput("classifier: num_classes must be positive");
  if (layer_weights.empty()) throw InvalidInput("classifier: no graph convolution layers");
  Eigen::Index width = input_dim;
  for (std::size_t j = 0; j < layer_weights.size(); ++j) {
    if (layer_weights[j].rows() != width)
      throw InvalidInput("classifier: layer " + std::to_string(j + 1) + " expects width " +
                         std::to_string(layer_weights[j].rows()) + ", previous stage emits " + std::to_string(width));
    width = layer_weights[j].cols();
  }
  head.check();
  if (head.input_dim() != width) throw InvalidInput("classifier: MLP input width does not match last layer");
  if (head.output_dim() != num_classes) throw InvalidInput("classifier: MLP output width differs from num_classes");
}

std::vector<Matrix> ClassifierModel::parameters() const {
  std::vector<Matrix> p = layer_weights;
  for (auto& m : head.parameters()) p.push_back(std::move(m));
  return p;
}

void ClassifierModel::set_parameters(const std::vector<Matrix>& params) {
  if (params.size() != layer_weights.size() + 4) throw InvalidInput("classifier: wrong number of parameter blocks");
  std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(layer_weights.size()), layer_weights.begin());
  head.set_parameters({params.end() - 4, params.end()});
}

ClassifierModel init_classifier(int input_dim, int num_classes, const ClassifierConfig& cfg, Rng& rng) {
  if (input_dim < 1 || num_classes < 1 || cfg.num_layers < 1 || cfg.hidden_dim < 1 || cfg.mlp_hidden_dim < 1)
    throw InvalidInput("init_classifier: dimensions must be positive");
  ClassifierModel m;
  m.config = cfg;
  m.input_dim = input_dim;
  m.num_classes = num_classes;
  int width = input_dim;
  for (int j = 0; j < cfg.num_layers; ++j) {
    m.layer_weights.push_back(glorot(width, cfg.hidden_dim, rng));
    width = cfg.hidden_dim;
  }
  m.head = init_mlp(width, cfg.mlp_hidden_dim, num_classes, rng);
  return m;
}

namespace {

Matrix checked_features(const Graph& g, const ClassifierModel& model) {
  Matrix x = node_features(g, model.config.features);
  if (x.cols() != model.input_dim)
    throw InvalidInput("classifier: graph has feature width " + std::to_string(x.cols()) + ", model expects " +
                       std::to_string(model.input_dim));
  return x;
}

}  // namespace

Matrix gcn_forward(const Graph& g, const ClassifierModel& model) {
  const Matrix x = checked_features(g, model);
  return gcn_stack(normalized_adjacency(g, model.config.self_loops), x, model.layer_weights);
}

Vector graph_embedding(const Matrix& f) { return max_pool(f); }

Prediction predict(const Graph& g, const ClassifierModel& model) {
  Prediction p;
  p.graph_embedding = graph_embedding(gcn_forward(g, model));
  const Matrix scores = model.head.forward(p.graph_embedding.transpose());
  p.logits = softmax<double>(scores.row(0).transpose());
  p.label = static_cast<int>(argmax(p.logits));
  return p;
}

LabelOracle make_label_oracle(std::shared_ptr<const ClassifierModel> model) {
  return [model = std::move(model)](const Graph& g) { return predict(g, *model).label; };
}

double classifier_loss(const Matrix& ahat, const Graph& g, int label, const ClassifierModel& model,
                       std::vector<Matrix>* grads) {
  const Matrix x = checked_features(g, model);
  if (label < 0 || label >= model.num_classes) throw InvalidInput("classifier_loss: label out of range");
  std::vector<ad::Var> layers;
  for (const auto& w : model.layer_weights) layers.push_back(ad::parameter(w));
  const MlpVars head = track(model.head);
  ad::Var u = ad::max_pool_rows(gcn_stack(ahat, x, layers));
  ad::Var scores = ad::transpose(forward(head, u));
  ad::Var logp = ad::log_softmax(scores, std::vector<bool>(static_cast<std::size_t>(model.num_classes), true));
  ad::Var loss = ad::scale(ad::element(logp, label, 0), -1.0);
  if (grads) {
    ad::backward(loss);
    grads->clear();
    for (const auto& w : layers) grads->push_back(w->grad.size() ? w->grad : Matrix::Zero(w->value.rows(), w->value.cols()));
    for (const auto& v : {head.w1, head.b1, head.w2, head.b2})
      grads->push_back(v->grad.size() ? v->grad : Matrix::Zero(v->value.rows(), v->value.cols()));
  }
  return loss->value(0, 0);
}

double classifier_loss(const Graph& g, int label, const ClassifierModel& model, std::vector<Matrix>* grads) {
  return classifier_loss(normalized_adjacency(g, model.config.self_loops), g, label, model, grads);
}

ClassifierTrainResult train_classifier(const std::vector<Graph>& dataset, const ClassifierConfig& cfg,
                                       const ClassifierTrainConfig& hyper, Rng& rng) {
  if (dataset.empty()) throw InvalidInput("train_classifier: empty dataset");
  std::set<int> classes;
  int max_label = -1;
  const auto width = node_features(dataset.front(), cfg.features).cols();
  for (const auto& g : dataset) {
    if (!g.label()) throw InvalidInput("train_classifier: unlabelled graph");
    if (*g.label() < 0) throw InvalidInput("train_classifier: negative label");
    if (node_features(g, cfg.features).cols() != width) throw InvalidInput("train_classifier: feature widths differ");
    classes.insert(*g.label());
    max_label = std::max(max_label, *g.label());
  }
  if (classes.size() < 2 && dataset.size() > 1)
    throw InvalidInput("train_classifier: dataset contains a single class");
  if (hyper.epochs < 1 || hyper.batch_size < 1 || !(hyper.learning_rate > 0))
    throw InvalidInput("train_classifier: invalid hyperparameters");

  ClassifierTrainResult result;
  result.model = init_classifier(static_cast<int>(width), std::max(2, max_label + 1), cfg, rng);
  ClassifierModel& model = result.model;

  std::vector<Matrix> ahat;
  ahat.reserve(dataset.size());
  for (const auto& g : dataset) ahat.push_back(normalized_adjacency(g, cfg.self_loops));

  std::vector<Matrix> params = model.parameters();
  std::vector<Matrix> velocity;
  for (const auto& p : params) velocity.push_back(Matrix::Zero(p.rows(), p.cols()));

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total_loss = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
      std::vector<Matrix> batch_grad;
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        std::vector<Matrix> g;
        total_loss += classifier_loss(ahat[i], dataset[i], *dataset[i].label(), model, &g);
        if (batch_grad.empty())
          batch_grad = std::move(g);
        else
          for (std::size_t b = 0; b < g.size(); ++b) batch_grad[b] += g[b];
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t b = 0; b < params.size(); ++b) {
        velocity[b] = hyper.momentum * velocity[b] + inv * batch_grad[b];
        params[b] -= hyper.learning_rate * velocity[b];
      }
      model.set_parameters(params);
    }
    result.epoch_loss.push_back(total_loss / static_cast<double>(dataset.size()));
    result.epoch_accuracy.push_back(accuracy(dataset, model));
  }
  return result;
}

double accuracy(const std::vector<Graph>& graphs, const ClassifierModel& model) {
  if (graphs.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& g : graphs)
    if (g.label() && predict(g, model).label == *g.label()) ++hits;
  return static_cast<double>(hits) / static_cast<double>(graphs.size());
}

double relative_embedding_change(const Vector& original, const Vector& attacked) {
  if (original.size() != attacked.size()) throw InvalidInput("relative_embedding_change: dimensions differ");
  const double base = original.norm();
  if (base == 0) throw DomainError("relative_embedding_change: original embedding has zero norm");
  return (attacked - original).norm() / base;
}

}  // namespace rewire
