#include "csense/linalg.hpp"

#include <cmath>

namespace csense {

namespace {

Vector deterministic_start(Eigen::Index n, bool perturbed) {
  Vector w = Vector::Ones(n);
  if (perturbed) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      w[i] += sign * 0.25 * static_cast<double>(i + 1) / static_cast<double>(n);
    }
  }
  w.normalize();
  return w;
}

}  // namespace

double spectral_norm(const Matrix& m, double tol, int max_iter) {
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0)
    throw std::domain_error("spectral_norm: matrix must be nonzero");
  if (tol <= 0.0) throw std::domain_error("spectral_norm: tol must be positive");

  double sigma = 0.0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Vector w = deterministic_start(m.cols(), attempt == 1);
    bool stalled = false;
    sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      Vector mw = m * w;
      const double sigma_new = mw.norm();
      if (sigma_new == 0.0) {  // start lies in the null space
        stalled = true;
        break;
      }
      w = m.transpose() * mw;
      w /= w.norm();
      if (std::abs(sigma_new - sigma) <= tol * sigma_new) return sigma_new;
      sigma = sigma_new;
    }
    if (!stalled) break;  // ran out of iterations with a live estimate
  }
  throw SpectralNormError("spectral_norm: no convergence within max_iter", sigma);
}

}  // namespace csense
