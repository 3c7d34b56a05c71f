#include "rewire/numeric.hpp"

namespace rewire {

Vector finite_diff_gradient(const ScalarFunction& f, const Vector& theta, double h) {
  if (!(h > 0)) throw InvalidInput("finite_diff_gradient: step must be positive");
  Vector grad(theta.size());
  Vector probe = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + h;
    const double up = f(probe);
    probe[i] = theta[i] - h;
    const double down = f(probe);
    probe[i] = theta[i];
    if (!std::isfinite(up) || !std::isfinite(down))
      throw OracleFailure("finite_diff_gradient: non-finite value at coordinate " + std::to_string(i));
    grad[i] = (up - down) / (2 * h);
  }
  return grad;
}

}  // namespace rewire
