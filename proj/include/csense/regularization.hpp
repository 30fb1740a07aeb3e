#pragma once

#include <cstdint>
#include <utility>

#include "csense/geometry.hpp"
#include "csense/norms.hpp"

namespace csense {

// Optimal split of the partially penalized regularization weight:
// lambda_i^* minimizes eta^2(lambda_i * subdifferential), and the
// program weight is their ratio.
struct LambdaSelection {
  double lambda1_star = 0.0;
  double lambda2_star = 0.0;
  double lambda_star = 0.0;  // lambda2_star / lambda1_star
  EtaProfile profile_sig;
  EtaProfile profile_cor;
};

LambdaSelection select_lambda(int n, int s_sig, int m, int s_cor);

enum class NoiseRegime { Noiseless, BoundedNoise, SubGaussianNoise };
enum class TauStrategy { MinMeasurements, MinError };

struct TauSelection {
  double beta = 2.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  NoiseRegime regime = NoiseRegime::Noiseless;
  TauStrategy strategy = TauStrategy::MinError;
  double tau1_bound = 0.0;
  double tau2_bound = 0.0;
};

struct TauInputs {
  int n = 0;
  int s_sig = 0;
  int m = 0;
  int s_cor = 0;
  double delta = 0.0;       // bounded-noise level
  double noise_psi2 = 1.0;  // sub-Gaussian noise scale L
  double beta = 2.0;
  double k = 1.0;  // sensing-row psi2 bound
  double c = 1.0;  // unpinned absolute constant, configurable
  std::uint64_t seed = 0;
  int gamma_draws = 2000;
  // Replace the Monte Carlo gamma of the l1 ball by its sqrt(2 ln n)
  // asymptotic (fast approximation).
  bool asymptotic_gamma = false;
  double noiseless_tau = 1e-5;
};

// Bounded-noise lower bounds:
//   tau1 >= (C K delta beta / sqrt(m)) [ gamma(B_f^n) + sqrt(m) r_f ]
//   tau2 >= beta delta r_g.
std::pair<double, double> tau_bounds_bounded(const TauInputs& in, const Norm& f,
                                             const Norm& g);

// Sub-Gaussian-noise lower bounds:
//   tau1 >= C K (1 + L^2) beta [ gamma(B_f^n) + sqrt(m) r_f ]
//   tau2 >= C L beta [ gamma(B_g^m) + sqrt(m) r_g ].
std::pair<double, double> tau_bounds_subgaussian(const TauInputs& in, const Norm& f,
                                                 const Norm& g);

// Simplified bounded-noise choice used for sparse signal and corruption:
// tau1 = C'K beta delta (the sqrt(n)+sqrt(m) shortcut at m = n collapses
// the gamma term to a constant), tau2 = beta delta. With C'K = 1 and
// beta = 2 both equal 2 delta.
std::pair<double, double> tau_simplified_bounded(double delta, double beta,
                                                 double c_prime_k = 1.0);

TauSelection select_tau(TauStrategy strategy, NoiseRegime regime, const TauInputs& in,
                        const Norm& f, const Norm& g);

// tau1 >= beta f*(Phi^T z) and tau2 >= beta g*(z).
bool check_condition1(double tau1, double tau2, double beta, const Matrix& phi,
                      const Vector& z, const Norm& f, const Norm& g);

}  // namespace csense
