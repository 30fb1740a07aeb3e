#include "csense/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csense/special.hpp"

namespace csense {

namespace {

constexpr std::uint64_t kTagGammaDraw = 0x67616d6d61ULL;  // per-draw seeds
constexpr std::uint64_t kTagConePoint = 0x636f6e65ULL;

double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double tol) {
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

double dist_to_scaled_subdiff_l1(const Vector& g, const SparseSignal& x, double t) {
  if (t < 0.0) throw std::domain_error("dist_to_scaled_subdiff_l1: t must be >= 0");
  if (g.size() != x.dim)
    throw std::domain_error("dist_to_scaled_subdiff_l1: dimension mismatch");
  double sq = 0.0;
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (k < x.support.size() && x.support[k] == static_cast<int>(i)) {
      const double sign = x.values[static_cast<Eigen::Index>(k)] > 0.0 ? 1.0 : -1.0;
      const double d = g[i] - t * sign;
      sq += d * d;
      ++k;
    } else {
      const double excess = std::abs(g[i]) - t;
      if (excess > 0.0) sq += excess * excess;
    }
  }
  return sq;
}

double eta2_closed_form_l1(int n, int s, double t) {
  if (n < 0 || s < 0 || s > n)
    throw std::domain_error("eta2_closed_form_l1: need 0 <= s <= n");
  if (t < 0.0) throw std::domain_error("eta2_closed_form_l1: t must be >= 0");
  const double on_support = s * (1.0 + t * t);
  const double tail = gaussian_upper_tail(t);
  const double off_support = 2.0 * (n - s) / std::sqrt(2.0 * M_PI) *
                             ((1.0 + t * t) * tail - t * std::exp(-t * t / 2.0));
  return on_support + off_support;
}

EtaProfile minimize_eta2(int n, int s) {
  if (n < 1 || s < 0 || s > n)
    throw std::domain_error("minimize_eta2: need 0 <= s <= n, n >= 1");
  EtaProfile profile;
  profile.dim = n;
  profile.sparsity = s;

  const double hi = std::sqrt(2.0 * std::log(static_cast<double>(std::max(n, 2)))) + 3.0;
  auto j = [n, s](double t) { return eta2_closed_form_l1(n, s, t); };

  profile.t_star = golden_section_min(j, 0.0, hi, 1e-6);
  if (j(0.0) <= j(profile.t_star)) profile.t_star = 0.0;  // boundary minimum
  profile.j_min = j(profile.t_star);

  const int points = 64;
  profile.curve.reserve(points + 1);
  for (int k = 0; k <= points; ++k) {
    const double t = hi * static_cast<double>(k) / points;
    profile.curve.emplace_back(t, j(t));
  }
  return profile;
}

double width_surrogate(int n, int s) { return minimize_eta2(n, s).j_min; }

GammaEstimate estimate_gamma_mc(int dim,
                                const std::function<double(const Vector&)>& sup_abs_inner,
                                int draws, RngState& rng) {
  if (draws < 2) throw std::domain_error("estimate_gamma_mc: need at least 2 draws");
  if (dim < 1) throw std::domain_error("estimate_gamma_mc: dim must be >= 1");
  // Per-draw derived seeds so the loop order (and any future
  // parallel split) cannot change the sampled values; summation is
  // in index order for reproducibility.
  const std::uint64_t base = rng.next_u64();
  std::vector<double> samples(static_cast<std::size_t>(draws));
  for (int i = 0; i < draws; ++i) {
    RngState draw_rng(derive_seed(base ^ kTagGammaDraw, static_cast<std::uint64_t>(i)));
    samples[static_cast<std::size_t>(i)] = sup_abs_inner(std_normal_vector(draw_rng, dim));
  }
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / draws;

  // Jackknife standard error of the mean.
  double ss = 0.0;
  for (double v : samples) {
    const double leave_out = (sum - v) / (draws - 1);
    ss += (leave_out - mean) * (leave_out - mean);
  }
  GammaEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(ss * (draws - 1) / draws);
  return est;
}

std::vector<std::pair<int, int>> threshold_curve(int m, int n) {
  if (m < 1 || n < 1) throw std::domain_error("threshold_curve: m, n must be >= 1");
  std::vector<double> surrogate_cor(static_cast<std::size_t>(m) + 1);
  for (int s = 0; s <= m; ++s) surrogate_cor[static_cast<std::size_t>(s)] = width_surrogate(m, s);

  std::vector<std::pair<int, int>> curve;
  const double budget = static_cast<double>(m);
  for (int s_sig = 0; s_sig <= n; ++s_sig) {
    const double used = width_surrogate(n, s_sig);
    if (used > budget || used + surrogate_cor[0] > budget) continue;  // infeasible row
    // largest s_cor with surrogate(m, s_cor) <= budget - used; the
    // surrogate is increasing in s, so bisect.
    int lo = 0, hi = m;
    while (lo < hi) {
      const int mid = (lo + hi + 1) / 2;
      if (used + surrogate_cor[static_cast<std::size_t>(mid)] <= budget)
        lo = mid;
      else
        hi = mid - 1;
    }
    curve.emplace_back(s_sig, lo);
  }
  return curve;
}

bool sandwich_check(double gamma, double omega, double y0_norm, double gamma_se,
                    double omega_se) {
  if (gamma < 0.0 || omega_se < 0.0 || gamma_se < 0.0)
    throw std::domain_error("sandwich_check: inputs must be >= 0");
  const double lower = (omega - 3.0 * omega_se + y0_norm) / 3.0;
  const double upper = 2.0 * (omega + 3.0 * omega_se) + y0_norm;
  return gamma + 3.0 * gamma_se >= lower && gamma - 3.0 * gamma_se <= upper;
}

std::vector<Vector> sample_product_tangent_cone(const SparseSignal& x_anchor,
                                                const SparseSignal& v_anchor,
                                                int count, RngState& rng) {
  const int n = x_anchor.dim;
  const int m = v_anchor.dim;
  const std::uint64_t base = rng.next_u64();

  // Descent direction of ||.||_1 at an s-sparse anchor: u with
  // <sign(anchor), u_supp> + ||u_off||_1 <= 0. Draw a Gaussian, flip the
  // support part so the inner product is negative, then scale the
  // off-support part down into the feasible range. At s = 0 the tangent
  // cone is {0}.
  auto descent_direction = [](const SparseSignal& anchor, RngState& local) {
    Vector u = Vector::Zero(anchor.dim);
    if (anchor.dim == 0) return u;
    if (anchor.sparsity() == 0) return u;
    Vector w = std_normal_vector(local, anchor.dim);
    double along = 0.0;
    for (int k = 0; k < anchor.sparsity(); ++k) {
      const double sign = anchor.values[k] > 0.0 ? 1.0 : -1.0;
      along += sign * w[anchor.support[static_cast<std::size_t>(k)]];
    }
    if (along > 0.0) {
      for (int k = 0; k < anchor.sparsity(); ++k)
        w[anchor.support[static_cast<std::size_t>(k)]] *= -1.0;
      along = -along;
    }
    double off_l1 = 0.0;
    std::size_t next = 0;
    for (int i = 0; i < anchor.dim; ++i) {
      if (next < anchor.support.size() && anchor.support[next] == i) {
        ++next;
        continue;
      }
      off_l1 += std::abs(w[i]);
    }
    const double room = -along;
    const double shrink =
        off_l1 > 0.0 ? std::min(1.0, local.next_unit() * room / off_l1) : 1.0;
    next = 0;
    for (int i = 0; i < anchor.dim; ++i) {
      if (next < anchor.support.size() && anchor.support[next] == i) {
        u[i] = w[i];
        ++next;
        continue;
      }
      u[i] = shrink * w[i];
    }
    return u;
  };

  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    RngState local(derive_seed(base ^ kTagConePoint, static_cast<std::uint64_t>(i)));
    Vector point(n + m);
    point.head(n) = descent_direction(x_anchor, local);
    point.tail(m) = descent_direction(v_anchor, local);
    const double norm = point.norm();
    if (norm == 0.0) {
      points.push_back(Vector::Zero(n + m));
      continue;
    }
    points.push_back(point / norm);
  }
  return points;
}

GeometrySummary summarize_geometry(int n, int s_sig, int m, int s_cor,
                                   std::uint64_t seed, int cone_samples,
                                   int gamma_draws) {
  GeometrySummary g;
  g.eta_sig = minimize_eta2(n, s_sig);
  g.eta_cor = minimize_eta2(m, s_cor);
  g.width_sig_sq = g.eta_sig.j_min;
  g.width_cor_sq = g.eta_cor.j_min;
  g.threshold = g.width_sig_sq + g.width_cor_sq;

  RngState rng(seed);
  RngState anchor_rng(derive_seed(seed, 0x616e63686fULL));
  const SparseSignal x_anchor = draw_sparse(anchor_rng, n, s_sig);
  const SparseSignal v_anchor = draw_sparse(anchor_rng, m, s_cor);
  const auto points = sample_product_tangent_cone(x_anchor, v_anchor, cone_samples, rng);

  auto sup_abs = [&points](const Vector& gauss) {
    double best = 0.0;
    for (const auto& p : points) best = std::max(best, std::abs(gauss.dot(p)));
    return best;
  };
  g.gamma_cone = estimate_gamma_mc(n + m, sup_abs, gamma_draws, rng);

  // Width of the same finite sample, same draws for a paired estimate.
  RngState rng_w(derive_seed(seed, 0x7769647468ULL));
  auto sup_plain = [&points](const Vector& gauss) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::max(best, gauss.dot(p));
    return best;
  };
  g.omega_cone = estimate_gamma_mc(n + m, sup_plain, gamma_draws, rng_w);
  g.witness_norm = points.empty() ? 0.0 : points.front().norm();
  return g;
}

}  // namespace csense
