#include <doctest.h>

#include <cmath>

#include "csense/linalg.hpp"
#include "csense/rng.hpp"
#include "csense/special.hpp"
#include "quadrature.hpp"

using namespace csense;

TEST_CASE("gaussian_upper_tail at t = 0 is the half-Gaussian mass") {
  CHECK(gaussian_upper_tail(0.0) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-14));
  CHECK(gaussian_upper_tail(0.0) == doctest::Approx(1.2533141373155003).epsilon(1e-12));
}

TEST_CASE("gaussian_upper_tail vanishes far in the tail") {
  CHECK(gaussian_upper_tail(40.0) <= 1e-12);
}

TEST_CASE("gaussian_upper_tail matches adaptive quadrature") {
  // integrate exp(-x^2/2) over [t, t + 60] (the remainder is < 1e-300)
  for (double t : {0.25, 0.5, 1.0, 1.7, 2.5, 4.0}) {
    const double oracle = test_oracle::integrate(
        [](double x) { return std::exp(-x * x / 2.0); }, t, t + 60.0, 1e-14);
    CHECK(gaussian_upper_tail(t) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("gaussian_upper_tail is strictly decreasing") {
  double prev = gaussian_upper_tail(0.0);
  for (double t = 0.1; t < 6.0; t += 0.1) {
    const double cur = gaussian_upper_tail(t);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("gaussian_upper_tail rejects bad input") {
  CHECK_THROWS_AS(gaussian_upper_tail(-0.1), std::domain_error);
  CHECK_THROWS_AS(gaussian_upper_tail(std::nan("")), std::domain_error);
}

TEST_CASE("spectral_norm of identity and diagonal") {
  CHECK(spectral_norm(Matrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-8));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  CHECK(spectral_norm(d) == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("spectral_norm matches the closed-form 2x2 SVD") {
  Matrix m(2, 2);
  m << 1.0, 1.0, 0.0, 1.0;
  // closed form for 2x2: sigma_max^2 is the larger root of
  // x^2 - (a^2+b^2+c^2+d^2) x + (ad - bc)^2 = 0
  const double q = 1.0 + 1.0 + 0.0 + 1.0;
  const double det = 1.0 * 1.0 - 1.0 * 0.0;
  const double sigma_sq = (q + std::sqrt(q * q - 4.0 * det * det)) / 2.0;
  CHECK(spectral_norm(m) == doctest::Approx(std::sqrt(sigma_sq)).epsilon(1e-8));
}

TEST_CASE("spectral_norm scales with |c|") {
  RngState rng(7);
  Matrix m(4, 6);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = rng.next_normal();
  const double base = spectral_norm(m);
  CHECK(spectral_norm(Matrix(-2.5 * m)) == doctest::Approx(2.5 * base).epsilon(2e-8));
}

TEST_CASE("spectral_norm recovers from a null-space start") {
  // all-ones start vector is in the null space of (1, -1)
  Matrix m(1, 2);
  m << 1.0, -1.0;
  CHECK(spectral_norm(m) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("spectral_norm rejects the zero matrix") {
  CHECK_THROWS_AS(spectral_norm(Matrix::Zero(3, 3)), std::domain_error);
}

TEST_CASE("std_normal_vector is deterministic in the seed") {
  RngState a(42), b(42);
  const Vector va = std_normal_vector(a, 257);
  const Vector vb = std_normal_vector(b, 257);
  CHECK((va - vb).norm() == 0.0);

  RngState c(43);
  CHECK((std_normal_vector(c, 257) - va).norm() > 0.0);
}

TEST_CASE("std_normal_vector moments at n = 1e5") {
  RngState rng(2024);
  const Vector v = std_normal_vector(rng, 100000);
  const double mean = v.mean();
  const double var = (v.array() - mean).square().sum() / (v.size() - 1);
  CHECK(mean >= -0.02);
  CHECK(mean <= 0.02);
  CHECK(var >= 0.98);
  CHECK(var <= 1.02);
}

TEST_CASE("std_normal_vector tail frequency near the normal quantile") {
  RngState rng(555);
  const Vector v = std_normal_vector(rng, 100000);
  int beyond = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1.96) ++beyond;
  const double frac = static_cast<double>(beyond) / static_cast<double>(v.size());
  CHECK(frac >= 0.04);
  CHECK(frac <= 0.06);
}

TEST_CASE("std_normal_vector rejects n = 0") {
  RngState rng(1);
  CHECK_THROWS_AS(std_normal_vector(rng, 0), std::domain_error);
}

TEST_CASE("derive_seed separates component streams") {
  const std::uint64_t parent = 99;
  CHECK(derive_seed(parent, 1) != derive_seed(parent, 2));
  CHECK(derive_seed(parent, 1) == derive_seed(parent, 1));
}
