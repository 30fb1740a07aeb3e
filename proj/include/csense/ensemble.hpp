#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "csense/linalg.hpp"
#include "csense/rng.hpp"

namespace csense {

enum class MatrixFamily { Gaussian, ScaledBernoulli };

enum class NoiseFamily { None, BoundedScaled, SubGaussianIID };

enum class SubGaussianLaw { Gaussian, Rademacher };

std::string to_string(MatrixFamily f);
MatrixFamily matrix_family_from_string(const std::string& s);

// Sparse vector as (support, values); off-support entries are exactly zero.
struct SparseSignal {
  int dim = 0;
  std::vector<int> support;  // sorted, distinct, in [0, dim)
  Vector values;             // one value per support index

  int sparsity() const { return static_cast<int>(support.size()); }
  Vector dense() const;
  double l1_norm() const { return values.lpNorm<1>(); }
  double l2_norm() const { return values.norm(); }
};

struct EnsembleSpec {
  MatrixFamily family = MatrixFamily::Gaussian;
  int m = 1;
  int n = 1;
  NoiseFamily noise = NoiseFamily::None;
  double delta = 0.0;        // BoundedScaled: exact noise norm
  double noise_psi2 = 1.0;   // SubGaussianIID: recorded L
  SubGaussianLaw noise_law = SubGaussianLaw::Gaussian;
  double subgaussian_k = 1.0;  // recorded metadata only

  void validate() const;
};

// One draw of the observation model y = Phi x* + v* + z.
struct ProblemInstance {
  Matrix phi;           // m x n
  SparseSignal x_true;  // dim n
  SparseSignal v_true;  // dim m
  Vector z;             // m
  Vector y;             // m
  double delta = 0.0;
  EnsembleSpec spec;
  std::uint64_t seed = 0;
};

// Row model: Gaussian N(0, 1/m) entries or symmetric Bernoulli +-1/sqrt(m),
// so that E Phi_i^T Phi_i = I_n / m in both families.
Matrix draw_sensing_matrix(RngState& rng, const EnsembleSpec& spec);

// Uniformly random s-subset support (Fisher-Yates partial shuffle),
// i.i.d. standard normal values on the support.
SparseSignal draw_sparse(RngState& rng, int dim, int s);

Vector draw_noise(RngState& rng, int m, const EnsembleSpec& spec);

ProblemInstance assemble(std::uint64_t seed, const EnsembleSpec& spec, int s_sig,
                         int s_cor);

// ||x_hat - x_true|| / ||x_true||; 0 when both vanish, +inf when only
// x_true does.
double relative_error(const Vector& x_hat, const Vector& x_true);

// sqrt(||x_hat - x_true||^2 + ||v_hat - v_true||^2).
double joint_error(const Vector& x_hat, const Vector& v_hat, const Vector& x_true,
                   const Vector& v_true);

// Flat text round trip: header lines m=, n=, delta=, family=, then the
// matrix rows and the x*, v*, z, y vectors, whitespace separated. Values
// are written in shortest round-trip form, so save/load is exact.
// The seed and noise-family metadata are not part of the format.
void save_instance(const ProblemInstance& p, std::ostream& out);
ProblemInstance load_instance(std::istream& in);
void save_instance_file(const ProblemInstance& p, const std::string& path);
ProblemInstance load_instance_file(const std::string& path);

}  // namespace csense
