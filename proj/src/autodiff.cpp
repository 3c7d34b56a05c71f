#include "rewire/autodiff.hpp"

#include <limits>
#include <string>
#include <unordered_set>

namespace rewire::ad {

void Node::accumulate(const Matrix& g) {
  if (grad.size() == 0)
    grad = g;
  else
    grad += g;
}

namespace {

Var make(Matrix value, std::vector<Var> parents, std::function<void(Node&)> fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  bool any = false;
  for (const auto& p : parents) any = any || p->requires_grad;
  node->requires_grad = any;
  if (any) {
    node->parents = std::move(parents);
    node->backward_fn = std::move(fn);
  }
  return node;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInput(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                       std::to_string(b.cols()));
}

}  // namespace

Var constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return node;
}

Var parameter(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return node;
}

Var matmul(const Var& a, const Var& b) {
  if (a->value.cols() != b->value.rows())
    throw InvalidInput("matmul: inner dimensions " + std::to_string(a->value.cols()) + " and " +
                       std::to_string(b->value.rows()) + " differ");
  Matrix out = a->value * b->value;
  return make(std::move(out), {a, b}, [](Node& self) {
    const Var& lhs = self.parents[0];
    const Var& rhs = self.parents[1];
    if (lhs->requires_grad) lhs->accumulate(self.grad * rhs->value.transpose());
    if (rhs->requires_grad) rhs->accumulate(lhs->value.transpose() * self.grad);
  });
}

Var matmul(const Matrix& lhs, const Var& b) {
  if (lhs.cols() != b->value.rows())
    throw InvalidInput("matmul: inner dimensions " + std::to_string(lhs.cols()) + " and " +
                       std::to_string(b->value.rows()) + " differ");
  Matrix out = lhs * b->value;
  return make(std::move(out), {b}, [lhs](Node& self) {
    self.parents[0]->accumulate(lhs.transpose() * self.grad);
  });
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a->value, b->value, "add");
  Matrix out = a->value + b->value;
  return make(std::move(out), {a, b}, [](Node& self) {
    for (const auto& p : self.parents)
      if (p->requires_grad) p->accumulate(self.grad);
  });
}

Var add_row(const Var& a, const Var& row) {
  if (row->value.rows() != 1 || row->value.cols() != a->value.cols())
    throw InvalidInput("add_row: row shape does not match matrix width");
  Matrix out = a->value.rowwise() + row->value.row(0);
  return make(std::move(out), {a, row}, [](Node& self) {
    if (self.parents[0]->requires_grad) self.parents[0]->accumulate(self.grad);
    if (self.parents[1]->requires_grad) self.parents[1]->accumulate(self.grad.colwise().sum());
  });
}

Var scale(const Var& a, double s) {
  Matrix out = s * a->value;
  return make(std::move(out), {a}, [s](Node& self) { self.parents[0]->accumulate(s * self.grad); });
}

Var transpose(const Var& a) {
  Matrix out = a->value.transpose();
  return make(std::move(out), {a}, [](Node& self) { self.parents[0]->accumulate(self.grad.transpose()); });
}

Var relu(const Var& a) {
  Matrix out = a->value.cwiseMax(0.0);
  return make(std::move(out), {a}, [](Node& self) {
    const Matrix& in = self.parents[0]->value;
    self.parents[0]->accumulate((in.array() > 0.0).cast<double>().matrix().cwiseProduct(self.grad));
  });
}

Var max_pool_rows(const Var& a) {
  const Matrix& v = a->value;
  if (v.rows() == 0) throw InvalidInput("max_pool_rows: no rows to pool");
  std::vector<Eigen::Index> arg(static_cast<std::size_t>(v.cols()), 0);
  Matrix out(1, v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < v.rows(); ++r)
      if (v(r, c) > v(best, c)) best = r;
    arg[static_cast<std::size_t>(c)] = best;
    out(0, c) = v(best, c);
  }
  return make(std::move(out), {a}, [arg = std::move(arg)](Node& self) {
    const Matrix& in = self.parents[0]->value;
    Matrix g = Matrix::Zero(in.rows(), in.cols());
    for (Eigen::Index c = 0; c < in.cols(); ++c) g(arg[static_cast<std::size_t>(c)], c) = self.grad(0, c);
    self.parents[0]->accumulate(g);
  });
}

Var gather_rows(const Var& a, std::vector<Eigen::Index> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), a->value.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a->value.rows()) throw InvalidInput("gather_rows: row index out of range");
    out.row(static_cast<Eigen::Index>(i)) = a->value.row(rows[i]);
  }
  return make(std::move(out), {a}, [rows = std::move(rows)](Node& self) {
    const Matrix& in = self.parents[0]->value;
    Matrix g = Matrix::Zero(in.rows(), in.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) g.row(rows[i]) += self.grad.row(static_cast<Eigen::Index>(i));
    self.parents[0]->accumulate(g);
  });
}

Var repeat_rows(const Var& row, Eigen::Index n) {
  if (row->value.rows() != 1) throw InvalidInput("repeat_rows: expected a single row");
  Matrix out = row->value.replicate(n, 1);
  return make(std::move(out), {row}, [](Node& self) { self.parents[0]->accumulate(self.grad.colwise().sum()); });
}

Var hcat(const std::vector<Var>& parts) {
  if (parts.empty()) throw InvalidInput("hcat: nothing to concatenate");
  const Eigen::Index rows = parts.front()->value.rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p->value.rows() != rows) throw InvalidInput("hcat: row counts differ");
    cols += p->value.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p->value.cols()) = p->value;
    at += p->value.cols();
  }
  return make(std::move(out), parts, [](Node& self) {
    Eigen::Index offset = 0;
    for (const auto& p : self.parents) {
      if (p->requires_grad) p->accumulate(self.grad.middleCols(offset, p->value.cols()));
      offset += p->value.cols();
    }
  });
}

Var log_softmax(const Var& column, const std::vector<bool>& mask) {
  const Matrix& v = column->value;
  if (v.cols() != 1 || static_cast<std::size_t>(v.rows()) != mask.size())
    throw InvalidInput("log_softmax: expected an n x 1 column matching the mask");
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    if (mask[static_cast<std::size_t>(i)]) hi = std::max(hi, v(i, 0));
  if (!std::isfinite(hi)) throw InvalidInput("log_softmax: mask selects no entries");
  double z = 0;
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    if (mask[static_cast<std::size_t>(i)]) z += std::exp(v(i, 0) - hi);
  const double lse = hi + std::log(z);
  Matrix out = Matrix::Zero(v.rows(), 1);
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    if (mask[static_cast<std::size_t>(i)]) out(i, 0) = v(i, 0) - lse;
  return make(std::move(out), {column}, [mask](Node& self) {
    // d/dz_j of sum_i g_i (z_i - lse) = g_j - p_j * sum_i g_i over unmasked entries.
    double gsum = 0;
    for (Eigen::Index i = 0; i < self.grad.rows(); ++i)
      if (mask[static_cast<std::size_t>(i)]) gsum += self.grad(i, 0);
    Matrix g = Matrix::Zero(self.value.rows(), 1);
    for (Eigen::Index i = 0; i < self.grad.rows(); ++i)
      if (mask[static_cast<std::size_t>(i)]) g(i, 0) = self.grad(i, 0) - std::exp(self.value(i, 0)) * gsum;
    self.parents[0]->accumulate(g);
  });
}

Var element(const Var& a, Eigen::Index i, Eigen::Index j) {
  if (i < 0 || j < 0 || i >= a->value.rows() || j >= a->value.cols())
    throw InvalidInput("element: index out of range");
  Matrix out(1, 1);
  out(0, 0) = a->value(i, j);
  return make(std::move(out), {a}, [i, j](Node& self) {
    const Matrix& in = self.parents[0]->value;
    Matrix g = Matrix::Zero(in.rows(), in.cols());
    g(i, j) = self.grad(0, 0);
    self.parents[0]->accumulate(g);
  });
}

Var sum(const Var& a) {
  Matrix out(1, 1);
  out(0, 0) = a->value.sum();
  return make(std::move(out), {a}, [](Node& self) {
    const Matrix& in = self.parents[0]->value;
    self.parents[0]->accumulate(Matrix::Constant(in.rows(), in.cols(), self.grad(0, 0)));
  });
}

void backward(const Var& root) {
  if (root->value.rows() != 1 || root->value.cols() != 1)
    throw InvalidInput("backward: root must be a 1x1 scalar");
  if (!root->requires_grad) return;

  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.get(), 0}};
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward_fn && node->grad.size() != 0) node->backward_fn(*node);
  }
}

}  // namespace rewire::ad
