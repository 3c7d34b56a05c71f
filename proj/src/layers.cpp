#include "rewire/layers.hpp"

#include <string>

namespace rewire {

Matrix normalized_adjacency(const Graph& g, bool self_loops) {
  const int n = g.num_nodes();
  Matrix a = g.adjacency();
  if (self_loops) a += Matrix::Identity(n, n);
  Vector inv_sqrt(n);
  for (int i = 0; i < n; ++i) {
    const double d = a.row(i).sum();
    inv_sqrt[i] = d > 0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

Matrix gcn_stack(const Matrix& ahat, const Matrix& x, const std::vector<Matrix>& weights) {
  Matrix f = x;
  for (const auto& w : weights) {
    if (f.cols() != w.rows())
      throw InvalidInput("gcn layer expects input width " + std::to_string(w.rows()) + ", got " +
                         std::to_string(f.cols()));
    f = (ahat * f * w).cwiseMax(0.0);
  }
  return f;
}

ad::Var gcn_stack(const Matrix& ahat, const Matrix& x, const std::vector<ad::Var>& weights) {
  ad::Var f = ad::constant(x);
  for (const auto& w : weights) f = ad::relu(ad::matmul(ahat, ad::matmul(f, w)));
  return f;
}

Vector max_pool(const Matrix& f) {
  if (f.rows() == 0) throw InvalidInput("max_pool: zero-node graph");
  return f.colwise().maxCoeff().transpose();
}

Matrix Mlp::forward(const Matrix& x) const {
  if (x.cols() != w1.rows())
    throw InvalidInput("mlp expects input width " + std::to_string(w1.rows()) + ", got " + std::to_string(x.cols()));
  Matrix h = ((x * w1).rowwise() + b1.row(0)).cwiseMax(0.0);
  return (h * w2).rowwise() + b2.row(0);
}

void Mlp::set_parameters(const std::vector<Matrix>& p) {
  if (p.size() != 4) throw InvalidInput("mlp expects 4 parameter blocks");
  w1 = p[0];
  b1 = p[1];
  w2 = p[2];
  b2 = p[3];
  check();
}

void Mlp::check() const {
  if (b1.rows() != 1 || b1.cols() != w1.cols() || w2.rows() != w1.cols() || b2.rows() != 1 || b2.cols() != w2.cols())
    throw InvalidInput("mlp parameter shapes do not chain");
}

MlpVars track(const Mlp& mlp) {
  return {ad::parameter(mlp.w1), ad::parameter(mlp.b1), ad::parameter(mlp.w2), ad::parameter(mlp.b2)};
}

ad::Var forward(const MlpVars& mlp, const ad::Var& x) {
  ad::Var h = ad::relu(ad::add_row(ad::matmul(x, mlp.w1), mlp.b1));
  return ad::add_row(ad::matmul(h, mlp.w2), mlp.b2);
}

Matrix glorot(Eigen::Index in, Eigen::Index out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> u(-limit, limit);
  Matrix w(in, out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
  return w;
}

Mlp init_mlp(Eigen::Index in, Eigen::Index hidden, Eigen::Index out, Rng& rng, bool zero_output) {
  Mlp m;
  m.w1 = glorot(in, hidden, rng);
  m.b1 = Matrix::Zero(1, hidden);
  m.w2 = zero_output ? Matrix(Matrix::Zero(hidden, out)) : glorot(hidden, out, rng);
  m.b2 = Matrix::Zero(1, out);
  return m;
}

}  // namespace rewire
