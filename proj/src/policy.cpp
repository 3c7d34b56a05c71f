#include "rewire/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace rewire {

void PolicyModel::validate() const {
  if (embedder.size() != 2) throw InvalidInput("policy: embedder must have exactly 2 GCN layers");
  if (embedder[0].rows() != input_dim) throw InvalidInput("policy: embedder input width mismatch");
  if (embedder[1].rows() != embedder[0].cols()) throw InvalidInput("policy: embedder layers do not chain");
  const Eigen::Index d = embedder[1].cols();
  edge_head.check();
  first_head.check();
  third_head.check();
  if (edge_head.input_dim() != 2 * d) throw InvalidInput("policy: edge head input must be 2*d_F");
  if (first_head.input_dim() != 3 * d) throw InvalidInput("policy: first-node head input must be 3*d_F");
  if (third_head.input_dim() != 4 * d) throw InvalidInput("policy: third-node head input must be 4*d_F");
  for (const Mlp* h : {&edge_head, &first_head, &third_head})
    if (h->output_dim() != 1) throw InvalidInput("policy: heads must emit one score per row");
}

std::vector<Matrix> PolicyModel::parameters() const {
  std::vector<Matrix> p = embedder;
  for (const Mlp* h : {&edge_head, &first_head, &third_head})
    for (auto& m : h->parameters()) p.push_back(std::move(m));
  return p;
}

void PolicyModel::set_parameters(const std::vector<Matrix>& params) {
  if (params.size() != embedder.size() + 12) throw InvalidInput("policy: wrong number of parameter blocks");
  auto it = params.begin();
  for (auto& w : embedder) w = *it++;
  for (Mlp* h : {&edge_head, &first_head, &third_head}) {
    h->set_parameters({it, it + 4});
    it += 4;
  }
}

PolicyModel init_policy(int input_dim, const PolicyConfig& cfg, Rng& rng) {
  if (input_dim < 1 || cfg.embed_dim < 1) throw InvalidInput("init_policy: dimensions must be positive");
  const int d = cfg.embed_dim;
  PolicyModel m;
  m.config = cfg;
  m.input_dim = input_dim;
  m.embedder = {glorot(input_dim, d, rng), glorot(d, d, rng)};
  m.edge_head = init_mlp(2 * d, d, 1, rng, cfg.zero_init_heads);
  m.first_head = init_mlp(3 * d, d, 1, rng, cfg.zero_init_heads);
  m.third_head = init_mlp(4 * d, d, 1, rng, cfg.zero_init_heads);
  return m;
}

namespace {

Matrix checked_features(const Graph& g, const PolicyModel& model) {
  Matrix x = node_features(g, model.config.features);
  if (x.cols() != model.input_dim)
    throw InvalidInput("policy: graph feature width " + std::to_string(x.cols()) + " but embedder expects " +
                       std::to_string(model.input_dim));
  return x;
}

// Whether each node, taken as the first node, has at least one third node.
std::vector<bool> first_node_ok(const Graph& g, ThirdNodeMode mode) {
  std::vector<bool> ok(static_cast<std::size_t>(g.num_nodes()), false);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.degree(v) == 0) continue;
    if (mode == ThirdNodeMode::AnyNode)
      ok[static_cast<std::size_t>(v)] = g.degree(v) < g.num_nodes() - 1;
    else
      ok[static_cast<std::size_t>(v)] = !k_hop_neighbors(g, v, 2).empty();
  }
  return ok;
}

Vector masked_softmax(const Vector& scores, const std::vector<bool>& mask) {
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (mask[static_cast<std::size_t>(i)]) hi = std::max(hi, scores[i]);
  Vector p = Vector::Zero(scores.size());
  if (!std::isfinite(hi)) return p;
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (mask[static_cast<std::size_t>(i)]) p[i] = std::exp(scores[i] - hi);
  return p / p.sum();
}

std::size_t sample_categorical(const Vector& probs, Rng& rng) {
  const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0;
  std::size_t last = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0) continue;
    acc += probs[i];
    last = static_cast<std::size_t>(i);
    if (r < acc) return last;
  }
  return last;
}

Matrix rows_with_prefix(const Vector& prefix, const Matrix& f, const std::vector<NodeId>& nodes) {
  Matrix out(static_cast<Eigen::Index>(nodes.size()), prefix.size() + f.cols());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.row(r).head(prefix.size()) = prefix.transpose();
    out.row(r).tail(f.cols()) = f.row(nodes[i]);
  }
  return out;
}

Vector third_base(const Edge& edge, NodeId fir, const StateEmbedding& emb, const Vector& edge_rep,
                  const PolicyModel& model) {
  const NodeId anchor = model.config.third_uses_first_node ? fir : edge.u;
  Vector base(edge_rep.size() + emb.nodes.cols());
  base << edge_rep, emb.nodes.row(anchor).transpose();
  return base;
}

}  // namespace

StateEmbedding embed_state(const Graph& g, const PolicyModel& model) {
  const Matrix x = checked_features(g, model);
  StateEmbedding e;
  e.nodes = gcn_stack(normalized_adjacency(g, model.config.self_loops), x, model.embedder);
  e.graph = max_pool(e.nodes);
  return e;
}

EdgeDistribution edge_distribution(const Graph& g, std::span<const Edge> edges, const StateEmbedding& emb,
                                   const PolicyModel& model, ThirdNodeMode mode) {
  const auto ok = first_node_ok(g, mode);
  const Eigen::Index d = emb.nodes.cols();
  EdgeDistribution out;
  out.edges.assign(edges.begin(), edges.end());
  out.representations.resize(static_cast<Eigen::Index>(edges.size()), 2 * d);
  out.admissible.resize(edges.size());
  bool any = false;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (!g.has_edge(e.u, e.v)) throw InvalidInput("edge_distribution: edge not in graph");
    const auto r = static_cast<Eigen::Index>(i);
    out.representations.row(r).head(d) = emb.graph.transpose();
    out.representations.row(r).tail(d) = 0.5 * (emb.nodes.row(e.u) + emb.nodes.row(e.v));
    out.admissible[i] = ok[static_cast<std::size_t>(e.u)] || ok[static_cast<std::size_t>(e.v)];
    any = any || out.admissible[i];
  }
  if (!any) throw EmptyActionSpace("edge_distribution: no edge admits a valid rewiring");
  const Matrix scores = model.edge_head.forward(out.representations);
  out.probs = masked_softmax(scores.col(0), out.admissible);
  return out;
}

EdgeDistribution edge_distribution(const Graph& g, const StateEmbedding& emb, const PolicyModel& model,
                                   ThirdNodeMode mode) {
  return edge_distribution(g, std::span<const Edge>(g.edges()), emb, model, mode);
}

Vector first_node_distribution(const Graph& g, const Edge& edge, const StateEmbedding& emb,
                               const Vector& edge_representation, const PolicyModel& model, ThirdNodeMode mode) {
  const std::vector<bool> mask{!third_node_candidates(g, edge.u, mode).empty(),
                               !third_node_candidates(g, edge.v, mode).empty()};
  if (!mask[0] && !mask[1])
    throw InvariantViolation("first_node_distribution: neither endpoint of an admissible edge has a third node");
  const Matrix rows = rows_with_prefix(edge_representation, emb.nodes, {edge.u, edge.v});
  return masked_softmax(model.first_head.forward(rows).col(0), mask);
}

ThirdNodeDistribution third_node_distribution(const Graph& g, NodeId fir, const Edge& edge, const StateEmbedding& emb,
                                              const Vector& edge_representation, const PolicyModel& model,
                                              ThirdNodeMode mode) {
  ThirdNodeDistribution out;
  out.candidates = third_node_candidates(g, fir, mode);
  if (out.candidates.empty()) throw EmptyActionSpace("third_node_distribution: no candidate third node");
  const Matrix rows = rows_with_prefix(third_base(edge, fir, emb, edge_representation, model), emb.nodes,
                                       out.candidates);
  out.probs = softmax<double>(model.third_head.forward(rows).col(0));
  return out;
}

ActionSample sample_action(const Graph& g, const PolicyModel& model, ThirdNodeMode mode, Rng& rng,
                           Decoding decoding) {
  const auto pick = [&](const Vector& probs) {
    return decoding == Decoding::Greedy ? static_cast<std::size_t>(argmax(probs)) : sample_categorical(probs, rng);
  };
  const StateEmbedding emb = embed_state(g, model);
  const EdgeDistribution edges = edge_distribution(g, emb, model, mode);
  const std::size_t ei = pick(edges.probs);
  const Edge& edge = edges.edges[ei];
  const Vector rep = edges.representations.row(static_cast<Eigen::Index>(ei)).transpose();

  const Vector first = first_node_distribution(g, edge, emb, rep, model, mode);
  const std::size_t fi = pick(first);
  const NodeId fir = fi == 0 ? edge.u : edge.v;
  const NodeId sec = fi == 0 ? edge.v : edge.u;

  const ThirdNodeDistribution third = third_node_distribution(g, fir, edge, emb, rep, model, mode);
  const std::size_t ti = pick(third.probs);

  ActionSample s;
  s.action = {fir, sec, third.candidates[ti]};
  s.stage_probs = {edges.probs[static_cast<Eigen::Index>(ei)], first[static_cast<Eigen::Index>(fi)],
                   third.probs[static_cast<Eigen::Index>(ti)]};
  s.log_prob = std::log(s.stage_probs[0]) + std::log(s.stage_probs[1]) + std::log(s.stage_probs[2]);
  return s;
}

double action_log_prob(const Graph& g, const RewiringAction& action, const PolicyModel& model, ThirdNodeMode mode,
                       std::vector<Matrix>* grads) {
  if (!is_valid_action(g, action, mode)) throw RejectedAction("action_log_prob: action not valid in this state");

  std::vector<ad::Var> embedder;
  for (const auto& w : model.embedder) embedder.push_back(ad::parameter(w));
  const MlpVars edge_head = track(model.edge_head);
  const MlpVars first_head = track(model.first_head);
  const MlpVars third_head = track(model.third_head);

  const ad::Var f = gcn_stack(normalized_adjacency(g, model.config.self_loops), checked_features(g, model), embedder);
  const ad::Var u = ad::max_pool_rows(f);

  // Stage 1: edge.
  const auto& edges = g.edges();
  const auto ok = first_node_ok(g, mode);
  std::vector<Eigen::Index> ends_a, ends_b;
  std::vector<bool> admissible;
  Eigen::Index chosen = -1;
  const Edge target = make_edge(action.fir, action.sec);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    ends_a.push_back(edges[i].u);
    ends_b.push_back(edges[i].v);
    admissible.push_back(ok[static_cast<std::size_t>(edges[i].u)] || ok[static_cast<std::size_t>(edges[i].v)]);
    if (edges[i] == target) chosen = static_cast<Eigen::Index>(i);
  }
  const auto m = static_cast<Eigen::Index>(edges.size());
  const ad::Var reps =
      ad::hcat({ad::repeat_rows(u, m), ad::scale(ad::add(ad::gather_rows(f, ends_a), ad::gather_rows(f, ends_b)), 0.5)});
  const ad::Var edge_lp = ad::log_softmax(forward(edge_head, reps), admissible);

  // Stage 2: which endpoint is the first node.
  const Edge& edge = edges[static_cast<std::size_t>(chosen)];
  const ad::Var rep = ad::gather_rows(reps, {chosen});
  const ad::Var v_rows = ad::hcat({ad::repeat_rows(rep, 2), ad::gather_rows(f, {edge.u, edge.v})});
  const std::vector<bool> first_mask{!third_node_candidates(g, edge.u, mode).empty(),
                                     !third_node_candidates(g, edge.v, mode).empty()};
  const ad::Var first_lp = ad::log_softmax(forward(first_head, v_rows), first_mask);
  const Eigen::Index fi = action.fir == edge.u ? 0 : 1;

  // Stage 3: third node.
  const auto candidates = third_node_candidates(g, action.fir, mode);
  const auto ti = static_cast<Eigen::Index>(std::find(candidates.begin(), candidates.end(), action.thi) -
                                            candidates.begin());
  const Eigen::Index anchor_row = model.config.third_uses_first_node ? fi : 0;
  const ad::Var base = ad::gather_rows(v_rows, {anchor_row});
  const std::vector<Eigen::Index> cand_rows(candidates.begin(), candidates.end());
  const ad::Var cand = ad::hcat({ad::repeat_rows(base, static_cast<Eigen::Index>(candidates.size())),
                                 ad::gather_rows(f, cand_rows)});
  const ad::Var third_lp =
      ad::log_softmax(forward(third_head, cand), std::vector<bool>(candidates.size(), true));

  const ad::Var total =
      ad::add(ad::add(ad::element(edge_lp, chosen, 0), ad::element(first_lp, fi, 0)), ad::element(third_lp, ti, 0));

  if (grads) {
    ad::backward(total);
    grads->clear();
    auto push = [&](const ad::Var& v) {
      grads->push_back(v->grad.size() ? v->grad : Matrix::Zero(v->value.rows(), v->value.cols()));
    };
    for (const auto& w : embedder) push(w);
    for (const MlpVars* h : {&edge_head, &first_head, &third_head})
      for (const auto& v : {h->w1, h->b1, h->w2, h->b2}) push(v);
  }
  return total->value(0, 0);
}

ActionChooser policy_chooser(const PolicyModel& model, ThirdNodeMode mode, Decoding decoding) {
  return [&model, mode, decoding](const Graph& g, Rng& rng) {
    const ActionSample s = sample_action(g, model, mode, rng, decoding);
    return std::make_pair(s.action, s.log_prob);
  };
}

namespace {

struct Advantages {
  std::vector<std::vector<double>> per_step;
  double baseline = 0;
  int steps = 0;
};

Advantages advantages(const std::vector<Trajectory>& batch) {
  Advantages a;
  double total = 0;
  for (const auto& t : batch) {
    std::vector<double> go(t.steps.size());
    double acc = 0;
    for (std::size_t i = t.steps.size(); i-- > 0;) {
      acc += t.steps[i].reward;
      go[i] = acc;
      total += acc;
    }
    a.steps += static_cast<int>(t.steps.size());
    a.per_step.push_back(std::move(go));
  }
  if (a.steps == 0) throw InvalidInput("reinforce: batch holds no steps");
  a.baseline = total / a.steps;
  for (auto& go : a.per_step)
    for (double& v : go) v -= a.baseline;
  return a;
}

}  // namespace

double reinforce_loss(const std::vector<Trajectory>& batch, const PolicyModel& model, ThirdNodeMode mode,
                      std::vector<Matrix>* grads) {
  if (batch.empty()) throw InvalidInput("reinforce: empty batch");
  const Advantages adv = advantages(batch);
  double loss = 0;
  if (grads) {
    grads->clear();
    for (const auto& p : model.parameters()) grads->push_back(Matrix::Zero(p.rows(), p.cols()));
  }
  for (std::size_t e = 0; e < batch.size(); ++e) {
    for (std::size_t t = 0; t < batch[e].steps.size(); ++t) {
      const double a = adv.per_step[e][t];
      const auto& step = batch[e].steps[t];
      if (a == 0.0 && grads == nullptr) continue;
      std::vector<Matrix> g;
      const double lp = action_log_prob(step.state, step.action, model, mode, grads ? &g : nullptr);
      loss -= lp * a;
      if (grads)
        for (std::size_t b = 0; b < g.size(); ++b) (*grads)[b] -= a * g[b];
    }
  }
  return loss;
}

ReinforceResult reinforce_update(const std::vector<Trajectory>& batch, const PolicyModel& model,
                                 const ReinforceConfig& cfg, ThirdNodeMode mode) {
  if (batch.empty()) throw InvalidInput("reinforce_update: empty batch");
  ReinforceResult r;
  const Advantages adv = advantages(batch);
  r.baseline = adv.baseline;
  r.steps = adv.steps;
  std::vector<Matrix> grads;
  r.loss = reinforce_loss(batch, model, mode, &grads);
  double sq = 0;
  for (const auto& g : grads) sq += g.squaredNorm();
  r.grad_norm = std::sqrt(sq);
  const double scale = (cfg.clip_norm > 0 && r.grad_norm > cfg.clip_norm) ? cfg.clip_norm / r.grad_norm : 1.0;
  std::vector<Matrix> params = model.parameters();
  for (std::size_t b = 0; b < params.size(); ++b) params[b] -= cfg.learning_rate * scale * grads[b];
  r.model = model;
  r.model.set_parameters(params);
  return r;
}

AttackerTrainResult train_attacker(const std::vector<Graph>& train_graphs, const LabelOracle& oracle,
                                   const AttackConfig& cfg, const AttackerTrainConfig& hyper, Rng& rng) {
  if (train_graphs.empty()) throw InvalidInput("train_attacker: no training graphs");
  if (hyper.epochs < 1 || hyper.batch_episodes < 1) throw InvalidInput("train_attacker: invalid hyperparameters");
  cfg.validate();
  AttackerTrainResult result;
  result.model = init_policy(static_cast<int>(node_features(train_graphs.front(), hyper.policy.features).cols()), hyper.policy, rng);

  std::vector<int> original(train_graphs.size());
  for (std::size_t i = 0; i < train_graphs.size(); ++i) original[i] = oracle(train_graphs[i]);

  std::vector<std::size_t> order(train_graphs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Trajectory> batch;
    int successes = 0;
    auto flush = [&] {
      bool any_step = false;
      for (const auto& t : batch) any_step = any_step || !t.steps.empty();
      if (any_step) result.model = reinforce_update(batch, result.model, hyper.update, cfg.third_node_mode).model;
      batch.clear();
    };
    for (std::size_t i : order) {
      Trajectory t = run_episode(train_graphs[i], original[i], oracle, cfg,
                                 policy_chooser(result.model, cfg.third_node_mode), rng);
      if (t.success()) ++successes;
      if (!t.steps.empty()) batch.push_back(std::move(t));
      if (static_cast<int>(batch.size()) >= hyper.batch_episodes) flush();
    }
    if (!batch.empty()) flush();
    result.epoch_success_rate.push_back(static_cast<double>(successes) / static_cast<double>(train_graphs.size()));
  }
  return result;
}

}  // namespace rewire
