#include "rewire/spectral.hpp"

#include <string>

namespace rewire {

Matrix laplacian(const Graph& g) {
  Matrix l = Matrix::Zero(g.num_nodes(), g.num_nodes());
  for (const auto& e : g.edges()) {
    l(e.u, e.v) -= 1.0;
    l(e.v, e.u) -= 1.0;
    l(e.u, e.u) += 1.0;
    l(e.v, e.v) += 1.0;
  }
  return l;
}

EigenDecomposition<double> laplacian_spectrum(const Graph& g) { return sym_eig<double>(laplacian(g)); }

Vector first_order_shift(const EigenDecomposition<double>& decomp, const Matrix& delta) {
  const Matrix& x = decomp.eigenvectors;
  if (delta.rows() != x.rows() || delta.cols() != x.rows())
    throw InvalidInput("first_order_shift: perturbation is " + std::to_string(delta.rows()) + "x" +
                       std::to_string(delta.cols()) + ", expected " + std::to_string(x.rows()) + " square");
  return (x.transpose() * delta * x).diagonal();
}

Matrix rewiring_delta_matrix(const RewiringAction& a, int n) {
  for (NodeId id : {a.fir, a.sec, a.thi})
    if (id < 0 || id >= n) throw InvalidInput("rewiring_delta_matrix: node id out of range");
  Matrix d = Matrix::Zero(n, n);
  d(a.fir, a.sec) += 1.0;
  d(a.sec, a.fir) += 1.0;
  d(a.fir, a.thi) -= 1.0;
  d(a.thi, a.fir) -= 1.0;
  d(a.sec, a.sec) -= 1.0;
  d(a.thi, a.thi) += 1.0;
  return d;
}

Vector rewiring_eig_delta(const EigenDecomposition<double>& decomp, const RewiringAction& a) {
  const Matrix& x = decomp.eigenvectors;
  const auto n = x.rows();
  for (NodeId id : {a.fir, a.sec, a.thi})
    if (id < 0 || id >= n) throw InvalidInput("rewiring_eig_delta: node id out of range");
  return (2.0 * x.row(a.fir) - x.row(a.thi) - x.row(a.sec))
      .cwiseProduct(x.row(a.sec) - x.row(a.thi))
      .transpose();
}

double algebraic_connectivity(const Graph& g) {
  if (g.num_nodes() < 2) throw InvalidInput("algebraic_connectivity: needs at least 2 nodes");
  return laplacian_spectrum(g).eigenvalues[1];
}

namespace {

double resistance_from_spectrum(const Vector& eigenvalues) {
  double s = 0;
  for (Eigen::Index i = 1; i < eigenvalues.size(); ++i) s += 1.0 / eigenvalues[i];
  return static_cast<double>(eigenvalues.size()) * s;
}

int count_zero(const Vector& eigenvalues) {
  int zeros = 0;
  for (double v : eigenvalues)
    if (v <= kZeroEigenvalue) ++zeros;
  return zeros;
}

}  // namespace

double effective_graph_resistance(const Graph& g) {
  if (g.num_nodes() == 0) throw InvalidInput("effective_graph_resistance: empty graph");
  if (connected_components(g).count != 1)
    throw DomainError("effective_graph_resistance: graph is disconnected, resistance is infinite");
  return resistance_from_spectrum(laplacian_spectrum(g).eigenvalues);
}

std::vector<std::optional<double>> eigenvalue_change_ratio(const Graph& original, const Graph& attacked) {
  if (original.num_nodes() != attacked.num_nodes())
    throw InvalidInput("eigenvalue_change_ratio: node counts differ");
  const Vector before = laplacian_spectrum(original).eigenvalues;
  const Vector after = laplacian_spectrum(attacked).eigenvalues;
  std::vector<std::optional<double>> out(static_cast<std::size_t>(before.size()));
  for (Eigen::Index i = 0; i < before.size(); ++i)
    if (before[i] > kZeroEigenvalue) out[static_cast<std::size_t>(i)] = std::abs(before[i] - after[i]) / before[i];
  return out;
}

SpectralReport spectral_report(const Graph& g) {
  auto decomp = laplacian_spectrum(g);
  SpectralReport r;
  r.zero_eigenvalues = count_zero(decomp.eigenvalues);
  r.algebraic_connectivity = decomp.eigenvalues.size() >= 2 ? decomp.eigenvalues[1] : 0.0;
  if (r.zero_eigenvalues == 1 && g.num_nodes() >= 1) r.effective_resistance = resistance_from_spectrum(decomp.eigenvalues);
  r.eigenvalues = std::move(decomp.eigenvalues);
  r.eigenvectors = std::move(decomp.eigenvectors);
  return r;
}

SpectralReport spectral_report(const Graph& g, const RewiringAction& a) {
  SpectralReport r = spectral_report(g);
  r.predicted_shift = rewiring_eig_delta({r.eigenvalues, r.eigenvectors}, a);
  return r;
}

}  // namespace rewire
