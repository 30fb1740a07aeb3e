#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "csense/linalg.hpp"

namespace csense {

// Coordinatewise sign(u_i) * (|u_i| - theta)_+ ; prox of theta * ||.||_1.
inline Vector soft_threshold(const Vector& u, double theta) {
  if (theta < 0.0) throw std::domain_error("soft_threshold: theta must be >= 0");
  Vector out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u[i]) - theta;
    out[i] = mag > 0.0 ? (u[i] > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

// Euclidean projection onto { v : ||v||_1 <= r } by sort-based
// threshold selection (Duchi et al. 2008). Interior points pass through.
inline Vector project_l1_ball(const Vector& u, double r) {
  if (r < 0.0) throw std::domain_error("project_l1_ball: radius must be >= 0");
  if (r == 0.0) return Vector::Zero(u.size());
  if (u.lpNorm<1>() <= r) return u;

  std::vector<double> mags(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) mags[i] = std::abs(u[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());

  double cumsum = 0.0;
  double rho_cumsum = 0.0;
  std::size_t rho = 0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumsum += mags[k];
    if (mags[k] > (cumsum - r) / static_cast<double>(k + 1)) {
      rho = k + 1;
      rho_cumsum = cumsum;
    }
  }
  const double theta = (rho_cumsum - r) / static_cast<double>(rho);
  return soft_threshold(u, theta);
}

// Euclidean projection onto { v : ||v||_2 <= r }; r = 0 maps to zero.
inline Vector project_l2_ball(const Vector& u, double r) {
  if (r < 0.0) throw std::domain_error("project_l2_ball: radius must be >= 0");
  const double norm = u.norm();
  if (norm <= r) return u;
  if (r == 0.0) return Vector::Zero(u.size());
  return u * (r / norm);
}

}  // namespace csense
