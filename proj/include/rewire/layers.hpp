#ifndef REWIRE_LAYERS_HPP
#define REWIRE_LAYERS_HPP

#include <vector>

#include "rewire/autodiff.hpp"
#include "rewire/graph.hpp"
#include "rewire/numeric.hpp"
#include "rewire/random.hpp"

// Building blocks shared by the victim classifier and the attacker policy.
namespace rewire {

/// D^{-1/2} A D^{-1/2}, or the same with A + I when `self_loops` is set.
/// Zero-degree rows and columns are zero.
Matrix normalized_adjacency(const Graph& g, bool self_loops);

/// Stacked graph convolutions F^j = ReLU(Ahat F^{j-1} W^j) starting from F^0 = x.
Matrix gcn_stack(const Matrix& ahat, const Matrix& x, const std::vector<Matrix>& weights);
ad::Var gcn_stack(const Matrix& ahat, const Matrix& x, const std::vector<ad::Var>& weights);

/// Columnwise max over rows, lowest index on ties.
Vector max_pool(const Matrix& f);

/// One hidden ReLU layer then a linear output: relu(x W1 + b1) W2 + b2.
struct Mlp {
  Matrix w1, b1, w2, b2;

  Eigen::Index input_dim() const { return w1.rows(); }
  Eigen::Index output_dim() const { return w2.cols(); }
  Matrix forward(const Matrix& x) const;
  std::vector<Matrix> parameters() const { return {w1, b1, w2, b2}; }
  void set_parameters(const std::vector<Matrix>& p);
  void check() const;
};

struct MlpVars {
  ad::Var w1, b1, w2, b2;
};

MlpVars track(const Mlp& mlp);
ad::Var forward(const MlpVars& mlp, const ad::Var& x);

/// Glorot-uniform weights, zero biases. With `zero_output` the final layer is
/// all zero so every output starts at 0.
Mlp init_mlp(Eigen::Index in, Eigen::Index hidden, Eigen::Index out, Rng& rng, bool zero_output = false);
Matrix glorot(Eigen::Index in, Eigen::Index out, Rng& rng);

}  // namespace rewire

#endif  // REWIRE_LAYERS_HPP
