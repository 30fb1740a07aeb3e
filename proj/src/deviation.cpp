#include "csense/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csense {

namespace {

constexpr std::uint64_t kTagTrial = 0x747269616cULL;

double deviation_at(const Matrix& a, double sqrt_m, const Vector& pa, const Vector& pb) {
  const double mapped = (a * pa + sqrt_m * pb).norm();
  const double reference = sqrt_m * std::sqrt(pa.squaredNorm() + pb.squaredNorm());
  return std::abs(mapped - reference);
}

Matrix draw_isotropic(RngState& rng, MatrixFamily family, int m, int n) {
  EnsembleSpec spec;
  spec.family = family;
  spec.m = m;
  spec.n = n;
  return isotropic_from_sensing(draw_sensing_matrix(rng, spec));
}

}  // namespace

std::string to_string(PointFamily f) {
  switch (f) {
    case PointFamily::SphereSamples: return "sphere";
    case PointFamily::SparseCone: return "sparse-cone";
    case PointFamily::L1Ball: return "l1-ball";
    case PointFamily::Singleton: return "singleton";
  }
  return "?";
}

Matrix isotropic_from_sensing(const Matrix& phi) {
  return std::sqrt(static_cast<double>(phi.rows())) * phi;
}

PointSet make_sphere_samples(int n, int m, int count, RngState& rng) {
  PointSet set;
  set.family = PointFamily::SphereSamples;
  set.points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector p = std_normal_vector(rng, n + m);
    p.normalize();
    set.points.emplace_back(p.head(n), p.tail(m));
    set.rad = 1.0;
  }
  return set;
}

PointSet make_sparse_cone(int n, int m, int s, int count, RngState& rng) {
  PointSet set;
  set.family = PointFamily::SparseCone;
  set.points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector p(n + m);
    p.head(n) = draw_sparse(rng, n, std::min(s, n)).dense();
    p.tail(m) = draw_sparse(rng, m, std::min(s, m)).dense();
    const double norm = p.norm();
    if (norm == 0.0) continue;
    p /= norm;
    set.points.emplace_back(p.head(n), p.tail(m));
    set.rad = 1.0;
  }
  return set;
}

PointSet make_l1_ball_vertices(int n, int m) {
  PointSet set;
  set.family = PointFamily::L1Ball;
  set.points.reserve(2 * static_cast<std::size_t>(n + m));
  for (int i = 0; i < n + m; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector p = Vector::Zero(n + m);
      p[i] = sign;
      set.points.emplace_back(p.head(n), p.tail(m));
    }
  }
  set.rad = 1.0;
  return set;
}

PointSet make_singleton(Vector a, Vector b) {
  PointSet set;
  set.family = PointFamily::Singleton;
  set.rad = std::sqrt(a.squaredNorm() + b.squaredNorm());
  set.points.emplace_back(std::move(a), std::move(b));
  return set;
}

void estimate_point_set_gamma(PointSet& set, int draws, RngState& rng) {
  if (set.points.empty()) throw std::domain_error("estimate_point_set_gamma: empty set");
  const int n = static_cast<int>(set.points.front().first.size());
  const int m = static_cast<int>(set.points.front().second.size());
  auto sup_abs = [&set, n](const Vector& g) {
    double best = 0.0;
    for (const auto& [pa, pb] : set.points) {
      const double inner = g.head(n).dot(pa) + g.tail(g.size() - n).dot(pb);
      best = std::max(best, std::abs(inner));
    }
    return best;
  };
  set.gamma = estimate_gamma_mc(n + m, sup_abs, draws, rng);
}

double sup_deviation(const Matrix& a, const PointSet& set) {
  if (set.points.empty()) throw std::domain_error("sup_deviation: empty set");
  const double sqrt_m = std::sqrt(static_cast<double>(a.rows()));
  double best = 0.0;
  for (const auto& [pa, pb] : set.points) {
    if (pa.size() != a.cols() || pb.size() != a.rows())
      throw std::domain_error("sup_deviation: dimension mismatch");
    best = std::max(best, deviation_at(a, sqrt_m, pa, pb));
  }
  return best;
}

DeviationReport verify_theorem1(PointFamily family, MatrixFamily ensemble, int n, int m,
                                int set_size, int trials, std::uint64_t seed, double k,
                                int sparse_s) {
  if (trials < 30) throw std::domain_error("verify_theorem1: need at least 30 trials");
  RngState set_rng(derive_seed(seed, 0x736574ULL));
  PointSet set;
  switch (family) {
    case PointFamily::SphereSamples:
      set = make_sphere_samples(n, m, set_size, set_rng);
      break;
    case PointFamily::SparseCone:
      set = make_sparse_cone(n, m, sparse_s, set_size, set_rng);
      break;
    case PointFamily::L1Ball:
      set = make_l1_ball_vertices(n, m);
      break;
    case PointFamily::Singleton: {
      Vector p = std_normal_vector(set_rng, n + m);
      p.normalize();
      set = make_singleton(p.head(n), p.tail(m));
      break;
    }
  }
  RngState gamma_rng(derive_seed(seed, 0x67616d6dULL));
  estimate_point_set_gamma(set, 2000, gamma_rng);

  DeviationReport report;
  report.family = family;
  report.ensemble = ensemble;
  report.set_size = static_cast<int>(set.points.size());
  report.gamma = set.gamma;
  report.rad = set.rad;
  report.sup_deviations.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    RngState trial_rng(derive_seed(seed ^ kTagTrial, static_cast<std::uint64_t>(t)));
    const Matrix a = draw_isotropic(trial_rng, ensemble, m, n);
    const double dev = sup_deviation(a, set);
    report.sup_deviations.push_back(dev);
    report.mean_deviation += dev;
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  report.mean_deviation /= trials;
  report.fitted_ratio = report.mean_deviation / (k * k * std::max(set.gamma.value, 1e-300));
  return report;
}

SingularBracket restricted_singular_bounds(const Matrix& a, const PointSet& set,
                                           double k, double c) {
  SingularBracket bracket;
  const double sqrt_m = std::sqrt(static_cast<double>(a.rows()));
  bracket.predicted_lower = sqrt_m - c * k * k * set.gamma.value;
  bracket.predicted_upper = sqrt_m + c * k * k * set.gamma.value;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& [pa, pb] : set.points) {
    const double norm = (a * pa + sqrt_m * pb).norm();
    lo = std::min(lo, norm);
    hi = std::max(hi, norm);
  }
  bracket.measured_min = lo;
  bracket.measured_max = hi;
  bracket.violated = lo < bracket.predicted_lower || hi > bracket.predicted_upper;
  return bracket;
}

ChevetReport verify_chevet(MatrixFamily ensemble, int m, int n, const Vector& w,
                           const std::vector<Vector>& t_points, int trials,
                           std::uint64_t seed) {
  if (w.norm() == 0.0) throw std::domain_error("verify_chevet: w must be nonzero");
  ChevetReport report;
  report.w_norm = w.norm();
  report.sups.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    RngState trial_rng(derive_seed(seed ^ kTagTrial, static_cast<std::uint64_t>(t)));
    const Matrix a = draw_isotropic(trial_rng, ensemble, m, n);
    const Vector atw = a.transpose() * w;
    double sup = -std::numeric_limits<double>::infinity();
    for (const auto& u : t_points) sup = std::max(sup, atw.dot(u));
    report.sups.push_back(sup);
    report.mean_sup += sup;
  }
  report.mean_sup /= trials;

  RngState gamma_rng(derive_seed(seed, 0x67616d6dULL));
  auto sup_abs = [&t_points](const Vector& g) {
    double best = 0.0;
    for (const auto& u : t_points) best = std::max(best, std::abs(g.dot(u)));
    return best;
  };
  report.gamma = estimate_gamma_mc(n, sup_abs, 2000, gamma_rng).value;
  report.mean_ratio = report.mean_sup / (report.w_norm * std::max(report.gamma, 1e-300));
  return report;
}

IncrementReport verify_increments(
    const std::vector<std::pair<std::pair<Vector, Vector>, std::pair<Vector, Vector>>>& pairs,
    MatrixFamily ensemble, int m, int n, int trials, std::uint64_t seed) {
  if (trials < 1000)
    throw std::domain_error("verify_increments: tail fit needs at least 1000 trials");
  IncrementReport report;
  const double sqrt_m = std::sqrt(static_cast<double>(m));

  for (std::size_t pair_idx = 0; pair_idx < pairs.size(); ++pair_idx) {
    const auto& [p1, p2] = pairs[pair_idx];
    IncrementFit fit;
    fit.distance = std::sqrt((p1.first - p2.first).squaredNorm() +
                             (p1.second - p2.second).squaredNorm());

    std::vector<double> increments(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
      RngState trial_rng(derive_seed(seed ^ (kTagTrial + pair_idx), static_cast<std::uint64_t>(t)));
      const Matrix a = draw_isotropic(trial_rng, ensemble, m, n);
      const double x1 = (a * p1.first + sqrt_m * p1.second).norm() -
                        sqrt_m * std::sqrt(p1.first.squaredNorm() + p1.second.squaredNorm());
      const double x2 = (a * p2.first + sqrt_m * p2.second).norm() -
                        sqrt_m * std::sqrt(p2.first.squaredNorm() + p2.second.squaredNorm());
      increments[static_cast<std::size_t>(t)] = std::abs(x1 - x2);
    }
    std::sort(increments.begin(), increments.end());

    // Quantile fit of P(|X| >= t) ~ exp(-t^2/K^2) at p in {1e-1, 1e-2}:
    // least squares of t_p^2 = K^2 ln(1/p) through the origin.
    double num = 0.0, den = 0.0;
    for (double p : {1e-1, 1e-2}) {
      const auto idx = static_cast<std::size_t>(std::floor((1.0 - p) * (trials - 1)));
      const double tq = increments[idx];
      const double lp = std::log(1.0 / p);
      num += tq * tq * lp;
      den += lp * lp;
    }
    fit.psi2_scale = std::sqrt(std::max(0.0, num / den));
    fit.ratio = fit.distance > 0.0 ? fit.psi2_scale / fit.distance
                                   : (fit.psi2_scale > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    report.max_ratio = std::max(report.max_ratio, fit.ratio);
    report.fits.push_back(fit);
  }
  return report;
}

}  // namespace csense
