#pragma once

#include <string>

#include "csense/linalg.hpp"

namespace csense {

// Structure-promoting norm with the capabilities every module needs:
// evaluation, dual norm, prox, ball projection, and squared distance to
// the scaled subdifferential at an anchor point. Only l1 and l2 are
// implemented; the interface is the hook for further instantiations.
class Norm {
 public:
  enum class Tag { L1, L2 };

  explicit Norm(Tag tag) : tag_(tag) {}
  static Norm l1() { return Norm(Tag::L1); }
  static Norm l2() { return Norm(Tag::L2); }

  Tag tag() const { return tag_; }
  std::string name() const { return tag_ == Tag::L1 ? "l1" : "l2"; }

  double evaluate(const Vector& u) const;
  double dual(const Vector& u) const;  // sup over the unit f-ball of <u, .>
  Vector prox(const Vector& u, double theta) const;
  Vector project_ball(const Vector& u, double r) const;

  // dist^2(g, t * subdifferential at x); t >= 0. For l1 the anchor enters
  // through its support and signs; for l2 through x / ||x||_2 (unit ball
  // at x = 0).
  double dist_to_scaled_subdiff_sq(const Vector& g, const Vector& x, double t) const;

  // alpha_f = sup f(u)/||u||_2 over u != 0 in R^dim.
  double compatibility_constant(int dim) const;

  // max ||u||_2 over the unit f-ball (1 for both l1 and l2).
  double unit_ball_l2_radius() const { return 1.0; }

 private:
  Tag tag_;
};

}  // namespace csense
