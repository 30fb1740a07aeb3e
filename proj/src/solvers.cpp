#include "csense/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace csense {

namespace {

// Hard cap on the constraint slack a converged constrained solve may
// report; keeps g(v_hat) <= kappa + 1e-6 and the residual within
// delta + 1e-6 regardless of the relative tolerance in use.
constexpr double kConstraintSlack = 1e-6;

double upsilon_opnorm_sq(const Matrix& phi) {
  // [Phi, I] [Phi, I]^T = Phi Phi^T + I, so the squared operator norm is
  // sigma_max(Phi)^2 + 1. Inflate slightly: the power-iteration estimate
  // can sit a hair below the true value and the prox steps need a
  // majorizing constant.
  const double sigma =
      phi.cwiseAbs().maxCoeff() == 0.0 ? 0.0 : spectral_norm(phi);
  return 1.01 * (sigma * sigma + 1.0);
}

struct Objective {
  double value;
  double smooth;  // 1/2 || y - Phi x - v ||^2
};

Objective fully_penalized_objective(const Matrix& phi, const Vector& y,
                                    const Vector& x, const Vector& v, double tau1,
                                    double tau2) {
  const double smooth = 0.5 * (y - phi * x - v).squaredNorm();
  return {smooth + tau1 * x.lpNorm<1>() + tau2 * v.lpNorm<1>(), smooth};
}

}  // namespace

std::string to_string(Procedure p) {
  switch (p) {
    case Procedure::ConstrainedSignal: return "constrained-signal";
    case Procedure::ConstrainedCorruption: return "constrained-corruption";
    case Procedure::PartiallyPenalized: return "partial";
    case Procedure::FullyPenalized: return "full";
  }
  return "?";
}

Procedure procedure_from_string(const std::string& s) {
  if (s == "constrained-signal") return Procedure::ConstrainedSignal;
  if (s == "constrained-corruption" || s == "constrained")
    return Procedure::ConstrainedCorruption;
  if (s == "partial") return Procedure::PartiallyPenalized;
  if (s == "full") return Procedure::FullyPenalized;
  throw std::invalid_argument("unknown procedure: " + s);
}

// FISTA with function-value restart on the composite objective
// 1/2 ||y - Phi x - v||^2 + tau1 ||x||_1 + tau2 ||v||_1. The smooth part
// has Lipschitz constant sigma_max([Phi, I])^2; restart falls back to
// the plain proximal step from the previous iterate, which cannot
// increase the objective, so the recorded history is nonincreasing.
SolveReport solve_fully_penalized(const ProblemInstance& p, const SolveConfig& cfg) {
  if (cfg.tau1 <= 0.0 || cfg.tau2 <= 0.0)
    throw std::domain_error("solve_fully_penalized: tau1, tau2 must be > 0");
  const auto t0 = std::chrono::steady_clock::now();
  const Matrix& phi = p.phi;
  const Vector& y = p.y;
  const int n = static_cast<int>(phi.cols());
  const int m = static_cast<int>(phi.rows());

  const double lip = upsilon_opnorm_sq(phi);
  const double step = 1.0 / lip;

  Vector x = Vector::Zero(n), v = Vector::Zero(m);
  Vector yx = x, yv = v;
  double t = 1.0;
  double f_prev = fully_penalized_objective(phi, y, x, v, cfg.tau1, cfg.tau2).value;

  SolveReport report;
  report.objective_history.reserve(256);
  report.objective_history.push_back(f_prev);

  auto prox_step = [&](const Vector& px, const Vector& pv, Vector& out_x, Vector& out_v) {
    const Vector resid = phi * px + pv - y;
    out_x = soft_threshold(px - step * (phi.transpose() * resid), step * cfg.tau1);
    out_v = soft_threshold(pv - step * resid, step * cfg.tau2);
  };

  for (int it = 1; it <= cfg.max_iter; ++it) {
    Vector x_new(n), v_new(m);
    prox_step(yx, yv, x_new, v_new);
    double f_new = fully_penalized_objective(phi, y, x_new, v_new, cfg.tau1, cfg.tau2).value;

    if (f_new > f_prev) {
      // restart: plain proximal step from the previous iterate
      prox_step(x, v, x_new, v_new);
      f_new = fully_penalized_objective(phi, y, x_new, v_new, cfg.tau1, cfg.tau2).value;
      t = 1.0;
    }

    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    yx = x_new + ((t - 1.0) / t_next) * (x_new - x);
    yv = v_new + ((t - 1.0) / t_next) * (v_new - v);
    t = t_next;

    const bool value_settled = std::abs(f_prev - f_new) <= cfg.tol * std::max(1.0, std::abs(f_new));
    x = x_new;
    v = v_new;
    report.objective_history.push_back(f_new);
    f_prev = f_new;
    report.iterations = it;

    if (value_settled) {
      // composite gradient mapping at the iterate itself
      Vector gx(n), gv(m);
      prox_step(x, v, gx, gv);
      const double map_norm =
          std::sqrt((x - gx).squaredNorm() + (v - gv).squaredNorm()) / step;
      const double scale = std::max(1.0, std::sqrt(x.squaredNorm() + v.squaredNorm()));
      if (map_norm <= cfg.tol * lip * scale) {
        report.converged = true;
        break;
      }
    }
  }

  report.x_hat = x;
  report.v_hat = v;
  report.objective = f_prev;
  report.residual_violation = 0.0;
  report.ball_violation = 0.0;
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

namespace {

// Shared linearized-ADMM core for the constrained and partially
// penalized programs:
//     min F(x) + G(v) + ind{||q||_2 <= delta}   s.t.  Phi x + v + q = y
// with F/G either a (scaled) l1 norm or an l1-ball indicator. The
// (x, v)-block is updated by one prox-linear step with majorizer
// L >= sigma_max([Phi, I])^2, q by projection, and the scaled dual by
// ascent. Stopping follows the usual primal/dual residual pair, with
// the dual residual carrying the linearization term
// rho (L I - U^T U)(s - s+).
struct BlockProx {
  // theta is the l1 weight (lambda for the penalized block, 1 for the
  // plain objective block); radius >= 0 selects ball projection instead.
  bool project = false;
  double weight = 1.0;
  double radius = 0.0;
};

SolveReport admm_solve(const ProblemInstance& p, const SolveConfig& cfg,
                       const BlockProx& x_prox, const BlockProx& v_prox,
                       double objective_weight_x, double objective_weight_v) {
  if (cfg.delta < 0.0) throw std::domain_error("admm: delta must be >= 0");
  if (cfg.rho <= 0.0) throw std::domain_error("admm: rho must be > 0");
  const auto t0 = std::chrono::steady_clock::now();
  const Matrix& phi = p.phi;
  const Vector& y = p.y;
  const int n = static_cast<int>(phi.cols());
  const int m = static_cast<int>(phi.rows());
  const double rho = cfg.rho;

  const double lip = upsilon_opnorm_sq(phi);

  Vector x = Vector::Zero(n), v = Vector::Zero(m);
  Vector q = Vector::Zero(m), u = Vector::Zero(m);
  Vector phi_x = Vector::Zero(m);  // Phi x, carried across iterations

  SolveReport report;
  report.primal_residuals.reserve(256);
  report.dual_residuals.reserve(256);

  auto apply_prox = [&](const BlockProx& bp, const Vector& point, double step_theta) {
    if (bp.project) return project_l1_ball(point, bp.radius);
    return soft_threshold(point, bp.weight * step_theta);
  };

  const double y_norm = y.norm();
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const Vector w = phi_x + v + q - y + u;
    const Vector grad_x = phi.transpose() * w;

    const Vector x_new = apply_prox(x_prox, x - grad_x / lip, 1.0 / (rho * lip));
    const Vector v_new = apply_prox(v_prox, v - w / lip, 1.0 / (rho * lip));

    const Vector phi_x_new = phi * x_new;
    const Vector q_new = project_l2_ball(y - phi_x_new - v_new - u, cfg.delta);

    const Vector r_prim = phi_x_new + v_new + q_new - y;
    u += r_prim;

    // dual residual of the prox-linear update:
    // rho [ (L I - U^T U)(s - s+) + U^T (q - q+) ],  U = [Phi, I]
    const Vector upsilon_ds = (phi_x - phi_x_new) + (v - v_new);
    const Vector mix = (q - q_new) - upsilon_ds;
    const Vector dual_x = rho * (lip * (x - x_new) + phi.transpose() * mix);
    const Vector dual_v = rho * (lip * (v - v_new) + mix);
    const double dual_norm = std::sqrt(dual_x.squaredNorm() + dual_v.squaredNorm());

    const double prim_norm = r_prim.norm();
    report.primal_residuals.push_back(prim_norm);
    report.dual_residuals.push_back(dual_norm);

    x = x_new;
    v = v_new;
    q = q_new;
    phi_x = phi_x_new;
    report.iterations = it;

    const double eps_pri =
        cfg.tol * (std::sqrt(static_cast<double>(m)) +
                   std::max({phi_x.norm() + v.norm(), q.norm(), y_norm}));
    const double eps_dual = cfg.tol * (std::sqrt(static_cast<double>(n + m)) +
                                       rho * std::sqrt(lip) * u.norm());
    if (prim_norm <= std::min(eps_pri, kConstraintSlack) && dual_norm <= eps_dual) {
      report.converged = true;
      break;
    }
  }

  report.x_hat = x;
  report.v_hat = v;
  report.objective = objective_weight_x * x.lpNorm<1>() + objective_weight_v * v.lpNorm<1>();
  report.residual_violation = std::max(0.0, (y - phi * x - v).norm() - cfg.delta);
  double ball_excess = 0.0;
  if (x_prox.project) ball_excess = std::max(ball_excess, x.lpNorm<1>() - x_prox.radius);
  if (v_prox.project) ball_excess = std::max(ball_excess, v.lpNorm<1>() - v_prox.radius);
  report.ball_violation = std::max(0.0, ball_excess);
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace

SolveReport solve_partially_penalized(const ProblemInstance& p, const SolveConfig& cfg) {
  if (cfg.lambda <= 0.0)
    throw std::domain_error("solve_partially_penalized: lambda must be > 0");
  BlockProx x_prox{false, 1.0, 0.0};
  BlockProx v_prox{false, cfg.lambda, 0.0};
  return admm_solve(p, cfg, x_prox, v_prox, 1.0, cfg.lambda);
}

SolveReport solve_constrained(const ProblemInstance& p, const SolveConfig& cfg) {
  if (cfg.procedure == Procedure::ConstrainedSignal) {
    if (cfg.kappa_g < 0.0) throw std::domain_error("solve_constrained: kappa must be >= 0");
    BlockProx x_prox{false, 1.0, 0.0};
    BlockProx v_prox{true, 0.0, cfg.kappa_g};
    return admm_solve(p, cfg, x_prox, v_prox, 1.0, 0.0);
  }
  if (cfg.procedure == Procedure::ConstrainedCorruption) {
    if (cfg.kappa_f < 0.0) throw std::domain_error("solve_constrained: kappa must be >= 0");
    BlockProx x_prox{true, 0.0, cfg.kappa_f};
    BlockProx v_prox{false, 1.0, 0.0};
    return admm_solve(p, cfg, x_prox, v_prox, 0.0, 1.0);
  }
  throw std::invalid_argument("solve_constrained: config names a penalized procedure");
}

SolveReport solve(const ProblemInstance& p, const SolveConfig& cfg) {
  switch (cfg.procedure) {
    case Procedure::ConstrainedSignal:
    case Procedure::ConstrainedCorruption:
      return solve_constrained(p, cfg);
    case Procedure::PartiallyPenalized:
      return solve_partially_penalized(p, cfg);
    case Procedure::FullyPenalized:
      return solve_fully_penalized(p, cfg);
  }
  throw std::invalid_argument("solve: unknown procedure");
}

RecoveryDiagnostic evaluate_recovery_condition(const GeometrySummary& geom,
                                               const RecoveryConditionInputs& in) {
  if (in.epsilon <= 0.0)
    throw std::domain_error("evaluate_recovery_condition: epsilon must be > 0");
  RecoveryDiagnostic d;
  const double omega_f = std::sqrt(std::max(0.0, geom.width_sig_sq));
  const double omega_g = std::sqrt(std::max(0.0, geom.width_cor_sq));
  d.gamma_c1 = 2.0 * (omega_f + omega_g + 1.0);
  d.gamma_c2 = 2.0 * std::sqrt(geom.width_sig_sq + geom.width_cor_sq) + 1.0;
  const double tau_term =
      std::sqrt(in.tau1 * in.alpha_f * in.tau1 * in.alpha_f +
                in.tau2 * in.alpha_g * in.tau2 * in.alpha_g) / in.beta;
  d.gamma_c3 =
      2.0 * (std::sqrt(in.eta_sq_f_tau + in.eta_sq_g_tau) + tau_term) + 1.0;

  const double sqrt_m = std::sqrt(static_cast<double>(in.m));
  const double ck2 = in.c * in.k * in.k;
  d.meets_c1 = sqrt_m >= ck2 * d.gamma_c1 + in.epsilon;
  d.meets_c2 = sqrt_m >= ck2 * d.gamma_c2 + in.epsilon;
  d.meets_c3 = sqrt_m >= ck2 * d.gamma_c3 + in.epsilon;

  d.error_bound_constrained = 2.0 * in.delta * sqrt_m / in.epsilon;
  d.error_bound_fully = 2.0 * in.m * (in.beta + 1.0) *
                        (in.tau1 * in.alpha_f + in.tau2 * in.alpha_g) /
                        (in.beta * in.epsilon * in.epsilon);
  return d;
}

}  // namespace csense
