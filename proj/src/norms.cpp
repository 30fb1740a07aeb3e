#include "csense/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "csense/prox.hpp"

namespace csense {

double Norm::evaluate(const Vector& u) const {
  return tag_ == Tag::L1 ? u.lpNorm<1>() : u.norm();
}

double Norm::dual(const Vector& u) const {
  return tag_ == Tag::L1 ? u.lpNorm<Eigen::Infinity>() : u.norm();
}

Vector Norm::prox(const Vector& u, double theta) const {
  if (theta < 0.0) throw std::domain_error("Norm::prox: theta must be >= 0");
  if (tag_ == Tag::L1) return soft_threshold(u, theta);
  const double norm = u.norm();
  if (norm <= theta) return Vector::Zero(u.size());
  return u * (1.0 - theta / norm);
}

Vector Norm::project_ball(const Vector& u, double r) const {
  return tag_ == Tag::L1 ? project_l1_ball(u, r) : project_l2_ball(u, r);
}

double Norm::dist_to_scaled_subdiff_sq(const Vector& g, const Vector& x,
                                       double t) const {
  if (t < 0.0) throw std::domain_error("dist_to_scaled_subdiff_sq: t must be >= 0");
  if (g.size() != x.size())
    throw std::domain_error("dist_to_scaled_subdiff_sq: dimension mismatch");
  if (tag_ == Tag::L1) {
    double sq = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (x[i] != 0.0) {
        const double d = g[i] - (x[i] > 0.0 ? t : -t);
        sq += d * d;
      } else {
        const double excess = std::abs(g[i]) - t;
        if (excess > 0.0) sq += excess * excess;
      }
    }
    return sq;
  }
  const double xnorm = x.norm();
  if (xnorm == 0.0) {
    // subdifferential of ||.||_2 at 0 is the unit ball, scaled by t
    const double excess = g.norm() - t;
    return excess > 0.0 ? excess * excess : 0.0;
  }
  return (g - x * (t / xnorm)).squaredNorm();
}

double Norm::compatibility_constant(int dim) const {
  if (dim < 1) throw std::domain_error("compatibility_constant: dim must be >= 1");
  return tag_ == Tag::L1 ? std::sqrt(static_cast<double>(dim)) : 1.0;
}

}  // namespace csense
