#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace csense {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct SpectralNormError : std::runtime_error {
  SpectralNormError(const std::string& what, double estimate)
      : std::runtime_error(what), last_estimate(estimate) {}
  double last_estimate;
};

// Largest singular value by power iteration on M^T M. Deterministic:
// starts from the normalized all-ones vector, with a single fixed
// perturbation retry if the iteration stalls at zero.
double spectral_norm(const Matrix& m, double tol = 1e-8, int max_iter = 5000);

}  // namespace csense
