#ifndef REWIRE_SPECTRAL_HPP
#define REWIRE_SPECTRAL_HPP

#include <optional>
#include <vector>

#include "rewire/graph.hpp"
#include "rewire/numeric.hpp"

namespace rewire {

/// Eigenvalues at or below this are treated as zero.
inline constexpr double kZeroEigenvalue = 1e-8;

/// L = D - A.
Matrix laplacian(const Graph& g);

EigenDecomposition<double> laplacian_spectrum(const Graph& g);

/// First-order eigenvalue shifts x_i^T * delta * x_i for every eigenpair.
Vector first_order_shift(const EigenDecomposition<double>& decomp, const Matrix& delta);

/// Change of the Laplacian caused by one rewiring on an n-node graph.
Matrix rewiring_delta_matrix(const RewiringAction& a, int n);

/// Closed form of first_order_shift for a single rewiring:
/// (2 x[fir] - x[thi] - x[sec]) * (x[sec] - x[thi]) per eigenvector.
Vector rewiring_eig_delta(const EigenDecomposition<double>& decomp, const RewiringAction& a);

/// Second-smallest Laplacian eigenvalue.
double algebraic_connectivity(const Graph& g);

/// |V| * sum over nonzero Laplacian eigenvalues of 1 / lambda. Throws
/// DomainError on disconnected graphs.
double effective_graph_resistance(const Graph& g);

/// |lambda_orig - lambda_att| / lambda_orig per index; indices whose original
/// eigenvalue is at most kZeroEigenvalue are empty.
std::vector<std::optional<double>> eigenvalue_change_ratio(const Graph& original, const Graph& attacked);

struct SpectralReport {
  Vector eigenvalues;
  Matrix eigenvectors;
  double algebraic_connectivity = 0;
  std::optional<double> effective_resistance;  // empty when disconnected
  int zero_eigenvalues = 0;
  Vector predicted_shift;  // filled when built for a specific rewiring
};

SpectralReport spectral_report(const Graph& g);
SpectralReport spectral_report(const Graph& g, const RewiringAction& a);

}  // namespace rewire

#endif  // REWIRE_SPECTRAL_HPP
