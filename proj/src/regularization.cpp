#include "csense/regularization.hpp"

#include <cmath>
#include <stdexcept>

namespace csense {

namespace {

constexpr double kLambdaFloor = 1e-12;

double gamma_unit_ball(const Norm& norm, int dim, const TauInputs& in) {
  if (in.asymptotic_gamma && norm.tag() == Norm::Tag::L1)
    return std::sqrt(2.0 * std::log(static_cast<double>(std::max(dim, 2))));
  RngState rng(derive_seed(in.seed, 0x67616d6261ULL ^ static_cast<std::uint64_t>(dim)));
  auto sup_abs = [&norm](const Vector& g) { return norm.dual(g); };
  return estimate_gamma_mc(dim, sup_abs, in.gamma_draws, rng).value;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace

LambdaSelection select_lambda(int n, int s_sig, int m, int s_cor) {
  if (n < 1 || m < 1)
    throw std::domain_error("select_lambda: degenerate dimensions");
  LambdaSelection sel;
  sel.profile_sig = minimize_eta2(n, s_sig);
  sel.profile_cor = minimize_eta2(m, s_cor);
  sel.lambda1_star = sel.profile_sig.t_star;
  sel.lambda2_star = sel.profile_cor.t_star;
  // Dense anchors push the minimizer to 0; keep the ratio finite so the
  // penalized program stays well posed at grid edges.
  const double l1 = std::max(sel.lambda1_star, kLambdaFloor);
  const double l2 = std::max(sel.lambda2_star, kLambdaFloor);
  sel.lambda_star = l2 / l1;
  return sel;
}

std::pair<double, double> tau_bounds_bounded(const TauInputs& in, const Norm& f,
                                             const Norm& g) {
  if (in.delta < 0.0) throw std::domain_error("tau_bounds_bounded: delta must be >= 0");
  if (in.beta <= 1.0) throw std::domain_error("tau_bounds_bounded: beta must be > 1");
  if (in.delta == 0.0) return {0.0, 0.0};
  const double sqrt_m = std::sqrt(static_cast<double>(in.m));
  const double tau1 = in.c * in.k * in.delta * in.beta / sqrt_m *
                      (gamma_unit_ball(f, in.n, in) + sqrt_m * f.unit_ball_l2_radius());
  const double tau2 = in.beta * in.delta * g.unit_ball_l2_radius();
  return {tau1, tau2};
}

std::pair<double, double> tau_bounds_subgaussian(const TauInputs& in, const Norm& f,
                                                 const Norm& g) {
  if (in.noise_psi2 <= 0.0)
    throw std::domain_error("tau_bounds_subgaussian: L must be > 0");
  if (in.beta <= 1.0) throw std::domain_error("tau_bounds_subgaussian: beta must be > 1");
  const double sqrt_m = std::sqrt(static_cast<double>(in.m));
  const double l = in.noise_psi2;
  const double tau1 = in.c * in.k * (1.0 + l * l) * in.beta *
                      (gamma_unit_ball(f, in.n, in) + sqrt_m * f.unit_ball_l2_radius());
  const double tau2 = in.c * l * in.beta *
                      (gamma_unit_ball(g, in.m, in) + sqrt_m * g.unit_ball_l2_radius());
  return {tau1, tau2};
}

std::pair<double, double> tau_simplified_bounded(double delta, double beta,
                                                 double c_prime_k) {
  if (delta < 0.0) throw std::domain_error("tau_simplified_bounded: delta must be >= 0");
  if (beta <= 1.0) throw std::domain_error("tau_simplified_bounded: beta must be > 1");
  return {c_prime_k * beta * delta, beta * delta};
}

TauSelection select_tau(TauStrategy strategy, NoiseRegime regime, const TauInputs& in,
                        const Norm& f, const Norm& g) {
  TauSelection sel;
  sel.beta = in.beta;
  sel.regime = regime;
  sel.strategy = strategy;

  switch (regime) {
    case NoiseRegime::Noiseless:
      sel.tau1_bound = 0.0;
      sel.tau2_bound = 0.0;
      break;
    case NoiseRegime::BoundedNoise: {
      auto [t1, t2] = tau_bounds_bounded(in, f, g);
      sel.tau1_bound = t1;
      sel.tau2_bound = t2;
      break;
    }
    case NoiseRegime::SubGaussianNoise: {
      auto [t1, t2] = tau_bounds_subgaussian(in, f, g);
      sel.tau1_bound = t1;
      sel.tau2_bound = t2;
      break;
    }
  }

  if (regime == NoiseRegime::Noiseless) {
    // The exact-recovery limit wants tau -> 0+; a small positive value
    // keeps the penalized objective well posed.
    sel.tau1 = in.noiseless_tau;
    sel.tau2 = in.noiseless_tau;
    return sel;
  }

  if (strategy == TauStrategy::MinError) {
    sel.tau1 = sel.tau1_bound;
    sel.tau2 = sel.tau2_bound;
    return sel;
  }

  // MinMeasurements: minimize eta^2(tau d f) + (alpha^2 / beta^2) tau^2
  // over tau >= bound; strictly convex, so golden-section on
  // [bound, bound + 10 sqrt(dim)] finds the minimum.
  auto pick = [&in](int dim, int s, double alpha, double bound) {
    auto objective = [&](double tau) {
      return eta2_closed_form_l1(dim, s, tau) +
             alpha * alpha / (in.beta * in.beta) * tau * tau;
    };
    const double hi = bound + 10.0 * std::sqrt(static_cast<double>(dim));
    double tau = golden_min(objective, bound, hi, 1e-6);
    if (objective(bound) <= objective(tau)) tau = bound;
    return tau;
  };
  if (f.tag() != Norm::Tag::L1 || g.tag() != Norm::Tag::L1)
    throw std::invalid_argument("select_tau: MinMeasurements needs the l1 profile");
  sel.tau1 = pick(in.n, in.s_sig, f.compatibility_constant(in.n), sel.tau1_bound);
  sel.tau2 = pick(in.m, in.s_cor, g.compatibility_constant(in.m), sel.tau2_bound);
  return sel;
}

bool check_condition1(double tau1, double tau2, double beta, const Matrix& phi,
                      const Vector& z, const Norm& f, const Norm& g) {
  if (phi.rows() != z.size())
    throw std::domain_error("check_condition1: dimension mismatch");
  const double f_dual = f.dual(phi.transpose() * z);
  const double g_dual = g.dual(z);
  return tau1 >= beta * f_dual && tau2 >= beta * g_dual;
}

}  // namespace csense
