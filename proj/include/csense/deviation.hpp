#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "csense/ensemble.hpp"
#include "csense/geometry.hpp"
#include "csense/linalg.hpp"

namespace csense {

// Empirical study of the deviation of || A a + sqrt(m) b ||_2 around
// sqrt(m) sqrt(||a||^2 + ||b||^2) over finite point sets, for isotropic
// sub-Gaussian A. Sensing-scale matrices convert through
// isotropic_from_sensing (A = sqrt(m) Phi). Suprema over finite samples
// lower-bound the continuous suprema, so every check here is one-sided.

enum class PointFamily { SphereSamples, SparseCone, L1Ball, Singleton };

std::string to_string(PointFamily f);

struct PointSet {
  std::vector<std::pair<Vector, Vector>> points;  // (a in R^n, b in R^m)
  PointFamily family = PointFamily::Singleton;
  GammaEstimate gamma;  // Monte Carlo complexity of the set
  double rad = 0.0;     // max ||(a, b)||_2
};

Matrix isotropic_from_sensing(const Matrix& phi);

PointSet make_sphere_samples(int n, int m, int count, RngState& rng);
PointSet make_sparse_cone(int n, int m, int s, int count, RngState& rng);
PointSet make_l1_ball_vertices(int n, int m);
PointSet make_singleton(Vector a, Vector b);

// Attaches the Monte Carlo gamma estimate (mean sup |<g, p>| over draws).
void estimate_point_set_gamma(PointSet& set, int draws, RngState& rng);

// Exact maximum of the deviation over the finite set.
double sup_deviation(const Matrix& a, const PointSet& set);

struct DeviationReport {
  PointFamily family = PointFamily::Singleton;
  MatrixFamily ensemble = MatrixFamily::Gaussian;
  int set_size = 0;
  std::vector<double> sup_deviations;  // one per trial
  double mean_deviation = 0.0;
  double max_deviation = 0.0;
  GammaEstimate gamma;
  double fitted_ratio = 0.0;  // mean_deviation / (K^2 gamma)
  double rad = 0.0;
};

DeviationReport verify_theorem1(PointFamily family, MatrixFamily ensemble, int n, int m,
                                int set_size, int trials, std::uint64_t seed,
                                double k = 1.0, int sparse_s = 4);

struct SingularBracket {
  double predicted_lower = 0.0;  // sqrt(m) - C K^2 gamma
  double predicted_upper = 0.0;  // sqrt(m) + C K^2 gamma
  double measured_min = 0.0;     // min ||A a + sqrt(m) b|| over the set
  double measured_max = 0.0;
  bool violated = false;
};

// Point set must be normalized to the unit sphere of R^{n+m}.
SingularBracket restricted_singular_bounds(const Matrix& a, const PointSet& set,
                                           double k, double c);

struct ChevetReport {
  std::vector<double> sups;  // sup_u <A u, w> per trial
  double mean_sup = 0.0;
  double gamma = 0.0;
  double w_norm = 0.0;
  double mean_ratio = 0.0;  // mean_sup / (||w|| gamma)
};

// T lives in R^n only (a-part); fresh A per trial.
ChevetReport verify_chevet(MatrixFamily ensemble, int m, int n, const Vector& w,
                           const std::vector<Vector>& t_points, int trials,
                           std::uint64_t seed);

struct IncrementFit {
  double distance = 0.0;    // ||(a,b) - (a',b')||_2
  double psi2_scale = 0.0;  // fitted K-hat of the increment tail
  double ratio = 0.0;       // psi2_scale / distance (0 distance -> 0 scale)
};

struct IncrementReport {
  std::vector<IncrementFit> fits;
  double max_ratio = 0.0;
};

// Fits exp(-t^2/K^2) tails of X_{a,b} - X_{a',b'} at survival levels
// 1e-1 and 1e-2 by least squares on the log-survival line; needs at
// least 1000 trials for a stable fit.
IncrementReport verify_increments(
    const std::vector<std::pair<std::pair<Vector, Vector>, std::pair<Vector, Vector>>>& pairs,
    MatrixFamily ensemble, int m, int n, int trials, std::uint64_t seed);

}  // namespace csense
