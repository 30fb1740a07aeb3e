#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "csense/ensemble.hpp"
#include "csense/linalg.hpp"
#include "csense/norms.hpp"
#include "csense/rng.hpp"

namespace csense {

// dist^2(g, t * subdifferential of ||.||_1 at x).
double dist_to_scaled_subdiff_l1(const Vector& g, const SparseSignal& x, double t);

// Closed form for E dist^2(g, t * subdifferential of ||.||_1 at an
// s-sparse point) in R^n:
//   s (1 + t^2) + 2 (n - s) / sqrt(2 pi)
//     * [ (1 + t^2) * gaussian_upper_tail(t) - t exp(-t^2 / 2) ].
double eta2_closed_form_l1(int n, int s, double t);

// Gaussian squared distance profile J(t) with its minimizer.
struct EtaProfile {
  int dim = 0;
  int sparsity = 0;
  std::vector<std::pair<double, double>> curve;  // (t, J(t)) samples
  double t_star = 0.0;
  double j_min = 0.0;
};

// Minimizes the strictly convex profile by golden-section search on
// [0, sqrt(2 ln max(n,2)) + 3] to |dt| <= 1e-6; samples the curve on
// at least 64 points.
EtaProfile minimize_eta2(int n, int s);

// J_min used as the squared-width surrogate in the recovery threshold.
double width_surrogate(int n, int s);

struct GammaEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Monte Carlo Gaussian complexity: mean over draws of
// sup_abs_inner(g) = sup_{u in T} |<g, u>|, with jackknife standard error.
GammaEstimate estimate_gamma_mc(int dim,
                                const std::function<double(const Vector&)>& sup_abs_inner,
                                int draws, RngState& rng);

// Boundary of { (s_sig, s_cor) : surrogate(n, s_sig) + surrogate(m, s_cor) <= m }:
// for each s_sig the largest feasible s_cor; infeasible rows are omitted.
std::vector<std::pair<int, int>> threshold_curve(int m, int n);

// Relation between complexity, width, and a witnessed element y0 of T:
// (omega + ||y0||) / 3 <= gamma <= 2 omega + ||y0||, with a slack of
// three standard errors on each side when the inputs are Monte Carlo.
bool sandwich_check(double gamma, double omega, double y0_norm, double gamma_se = 0.0,
                    double omega_se = 0.0);

// Finite sample of the product tangent cone intersected with the unit
// sphere: directions (a, b) with a a descent direction of ||.||_1 at
// x_anchor and b one at v_anchor. Used for one-sided Monte Carlo
// complexity estimates (finite samples lower-bound the true sup).
std::vector<Vector> sample_product_tangent_cone(const SparseSignal& x_anchor,
                                                const SparseSignal& v_anchor,
                                                int count, RngState& rng);

struct GeometrySummary {
  EtaProfile eta_sig;
  EtaProfile eta_cor;
  double width_sig_sq = 0.0;
  double width_cor_sq = 0.0;
  GammaEstimate gamma_cone;   // complexity of the sampled product cone
  GammaEstimate omega_cone;   // width of the same sample
  double witness_norm = 0.0;  // ||y0|| for the sandwich relation
  double threshold = 0.0;     // width_sig_sq + width_cor_sq
};

GeometrySummary summarize_geometry(int n, int s_sig, int m, int s_cor,
                                   std::uint64_t seed, int cone_samples = 256,
                                   int gamma_draws = 2000);

}  // namespace csense
