#ifndef REWIRE_AUTODIFF_HPP
#define REWIRE_AUTODIFF_HPP

#include <functional>
#include <memory>
#include <vector>

#include "rewire/numeric.hpp"

// Minimal reverse-mode differentiation over dense matrices. Each operation
// allocates a node holding its value and a closure that pushes the node's
// gradient into its parents; backward() walks the graph in reverse
// topological order from a 1x1 root.
namespace rewire::ad {

struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
  Matrix value;
  Matrix grad;
  bool requires_grad = false;
  std::vector<Var> parents;
  std::function<void(Node&)> backward_fn;

  void accumulate(const Matrix& g);
};

Var constant(Matrix value);
Var parameter(Matrix value);

Var matmul(const Var& a, const Var& b);
Var matmul(const Matrix& lhs, const Var& b);
Var add(const Var& a, const Var& b);
/// Adds a 1 x c row to every row of `a`.
Var add_row(const Var& a, const Var& row);
Var scale(const Var& a, double s);
Var transpose(const Var& a);
Var relu(const Var& a);
/// Columnwise max over rows; the gradient goes to the lowest-index maximiser.
Var max_pool_rows(const Var& a);
Var gather_rows(const Var& a, std::vector<Eigen::Index> rows);
Var repeat_rows(const Var& row, Eigen::Index n);
Var hcat(const std::vector<Var>& parts);
/// Log-softmax over an n x 1 column restricted to entries with mask[i] set.
/// Masked-out entries carry value 0 and receive no gradient.
Var log_softmax(const Var& column, const std::vector<bool>& mask);
Var element(const Var& a, Eigen::Index i, Eigen::Index j);
Var sum(const Var& a);

void backward(const Var& root);

}  // namespace rewire::ad

#endif  // REWIRE_AUTODIFF_HPP
