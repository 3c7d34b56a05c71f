#ifndef REWIRE_NUMERIC_HPP
#define REWIRE_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rewire/error.hpp"

namespace rewire {

// Dense storage is row-major throughout the library.
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = DenseMatrix<double>;
using Vector = DenseVector<double>;

template <typename Scalar>
struct EigenDecomposition {
  DenseVector<Scalar> eigenvalues;   // ascending
  DenseMatrix<Scalar> eigenvectors;  // column i pairs with eigenvalues[i]
};

inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kSymmetryTolerance = 1e-10;

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar tol) {
  using std::abs;
  if (m.rows() != m.cols()) return false;
  const auto scale = std::max<typename Derived::Scalar>(1, m.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (abs(m(i, j) - m(j, i)) > tol * scale) return false;
  return true;
}

/// Full eigendecomposition of a real symmetric matrix by cyclic Jacobi
/// rotations. Eigenvalues come back ascending; no basis is chosen inside
/// degenerate eigenspaces.
template <typename Scalar>
EigenDecomposition<Scalar> sym_eig(const DenseMatrix<Scalar>& m) {
  using std::abs;
  using std::sqrt;
  if (m.rows() != m.cols())
    throw InvalidInput("sym_eig: matrix is " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + ", expected square");
  if (!is_symmetric(m, Scalar(kSymmetryTolerance)))
    throw InvalidInput("sym_eig: matrix is not symmetric");

  const Eigen::Index n = m.rows();
  DenseMatrix<Scalar> a = Scalar(0.5) * (m + m.transpose());
  DenseMatrix<Scalar> v = DenseMatrix<Scalar>::Identity(n, n);

  auto off_norm = [&] {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) s += 2 * a(i, j) * a(i, j);
    return sqrt(s);
  };
  const Scalar threshold = Scalar(kJacobiTolerance) * std::max<Scalar>(Scalar(1), a.norm());

  int sweep = 0;
  for (; sweep < kJacobiMaxSweeps && off_norm() > threshold; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (2 * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) / (abs(theta) + sqrt(theta * theta + 1));
        const Scalar c = 1 / sqrt(t * t + 1);
        const Scalar s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p);
          const Scalar vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kJacobiMaxSweeps && off_norm() > threshold)
    throw InvariantViolation("sym_eig: Jacobi did not converge in " + std::to_string(kJacobiMaxSweeps) +
                             " sweeps");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  EigenDecomposition<Scalar> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Max-subtracted softmax.
template <typename Scalar>
DenseVector<Scalar> softmax(const DenseVector<Scalar>& v) {
  if (v.size() == 0) throw InvalidInput("softmax: empty vector");
  DenseVector<Scalar> e = (v.array() - v.maxCoeff()).exp();
  return e / e.sum();
}

inline constexpr double kProbabilityFloor = 1e-12;

/// −log p[label] with p[label] floored at 1e-12.
template <typename Scalar>
Scalar cross_entropy(const DenseVector<Scalar>& probs, Eigen::Index label) {
  using std::log;
  if (label < 0 || label >= probs.size())
    throw InvalidInput("cross_entropy: label " + std::to_string(label) + " out of range [0," +
                       std::to_string(probs.size()) + ")");
  return -log(std::max<Scalar>(probs[label], Scalar(kProbabilityFloor)));
}

/// Index of the largest entry; ties go to the lowest index.
template <typename Scalar>
Eigen::Index argmax(const DenseVector<Scalar>& v) {
  if (v.size() == 0) throw InvalidInput("argmax: empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

/// Concatenates row-major entries of every matrix into one vector.
inline Vector flatten(const std::vector<Matrix>& parts) {
  Eigen::Index total = 0;
  for (const auto& m : parts) total += m.size();
  Vector out(total);
  Eigen::Index at = 0;
  for (const auto& m : parts) {
    out.segment(at, m.size()) = Eigen::Map<const Vector>(m.data(), m.size());
    at += m.size();
  }
  return out;
}

/// Inverse of flatten; shapes are taken from `parts`.
inline void unflatten(const Vector& flat, std::vector<Matrix>& parts) {
  Eigen::Index at = 0;
  for (auto& m : parts) {
    if (at + m.size() > flat.size()) throw InvalidInput("unflatten: vector too short");
    Eigen::Map<Vector>(m.data(), m.size()) = flat.segment(at, m.size());
    at += m.size();
  }
  if (at != flat.size()) throw InvalidInput("unflatten: vector too long");
}

using ScalarFunction = std::function<double(const Vector&)>;

/// Central-difference gradient, used as a test oracle for analytic gradients.
Vector finite_diff_gradient(const ScalarFunction& f, const Vector& theta, double h);

}  // namespace rewire

#endif  // REWIRE_NUMERIC_HPP
