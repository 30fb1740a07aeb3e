#include "csense/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace csense {

namespace {

// Component tags for child-seed derivation inside assemble().
constexpr std::uint64_t kTagMatrix = 1;
constexpr std::uint64_t kTagSignal = 2;
constexpr std::uint64_t kTagCorruption = 3;
constexpr std::uint64_t kTagNoise = 4;

void write_double(std::ostream& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

double read_double(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) throw std::runtime_error(std::string("instance parse: missing ") + what);
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw std::runtime_error(std::string("instance parse: bad value for ") + what + ": " + token);
  return v;
}

std::string header_value(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("instance parse: missing header " + key);
  if (line.rfind(key, 0) != 0)
    throw std::runtime_error("instance parse: expected header " + key + ", got: " + line);
  return line.substr(key.size());
}

}  // namespace

std::string to_string(MatrixFamily f) {
  return f == MatrixFamily::Gaussian ? "gaussian" : "bernoulli";
}

MatrixFamily matrix_family_from_string(const std::string& s) {
  if (s == "gaussian") return MatrixFamily::Gaussian;
  if (s == "bernoulli") return MatrixFamily::ScaledBernoulli;
  throw std::invalid_argument("unknown matrix family: " + s);
}

Vector SparseSignal::dense() const {
  Vector out = Vector::Zero(dim);
  for (std::size_t k = 0; k < support.size(); ++k) out[support[k]] = values[static_cast<Eigen::Index>(k)];
  return out;
}

void EnsembleSpec::validate() const {
  if (m < 1 || n < 1) throw std::invalid_argument("EnsembleSpec: m, n must be >= 1");
  if (delta < 0.0) throw std::domain_error("EnsembleSpec: delta must be >= 0");
  if (noise == NoiseFamily::SubGaussianIID && noise_psi2 <= 0.0)
    throw std::invalid_argument("EnsembleSpec: sub-Gaussian noise needs L > 0");
}

Matrix draw_sensing_matrix(RngState& rng, const EnsembleSpec& spec) {
  spec.validate();
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m));
  Matrix phi(spec.m, spec.n);
  switch (spec.family) {
    case MatrixFamily::Gaussian: {
      Vector entries = std_normal_vector(rng, spec.m * spec.n);
      Eigen::Index k = 0;
      for (int i = 0; i < spec.m; ++i)
        for (int j = 0; j < spec.n; ++j) phi(i, j) = entries[k++] * scale;
      break;
    }
    case MatrixFamily::ScaledBernoulli: {
      for (int i = 0; i < spec.m; ++i)
        for (int j = 0; j < spec.n; ++j)
          phi(i, j) = (rng.next_u64() >> 63) ? scale : -scale;
      break;
    }
    default:
      throw std::invalid_argument("draw_sensing_matrix: unknown family");
  }
  return phi;
}

SparseSignal draw_sparse(RngState& rng, int dim, int s) {
  if (dim < 0 || s < 0 || s > dim)
    throw std::domain_error("draw_sparse: need 0 <= s <= dim");
  SparseSignal sig;
  sig.dim = dim;
  std::vector<int> pool(dim);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < s; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(dim - i)));
    std::swap(pool[i], pool[j]);
  }
  sig.support.assign(pool.begin(), pool.begin() + s);
  std::sort(sig.support.begin(), sig.support.end());
  sig.values = s > 0 ? std_normal_vector(rng, s) : Vector(0);
  return sig;
}

Vector draw_noise(RngState& rng, int m, const EnsembleSpec& spec) {
  if (spec.delta < 0.0) throw std::domain_error("draw_noise: delta must be >= 0");
  switch (spec.noise) {
    case NoiseFamily::None:
      return Vector::Zero(m);
    case NoiseFamily::BoundedScaled: {
      if (spec.delta == 0.0) return Vector::Zero(m);
      Vector z = std_normal_vector(rng, m);
      double norm = z.norm();
      while (norm == 0.0) {  // probability-zero draw; keep the stream moving
        z = std_normal_vector(rng, m);
        norm = z.norm();
      }
      return z * (spec.delta / norm);
    }
    case NoiseFamily::SubGaussianIID: {
      if (spec.noise_law == SubGaussianLaw::Gaussian) return std_normal_vector(rng, m);
      Vector z(m);
      for (int i = 0; i < m; ++i) z[i] = (rng.next_u64() >> 63) ? 1.0 : -1.0;
      return z;
    }
  }
  throw std::invalid_argument("draw_noise: unknown family");
}

ProblemInstance assemble(std::uint64_t seed, const EnsembleSpec& spec, int s_sig,
                         int s_cor) {
  spec.validate();
  if (s_sig < 0 || s_sig > spec.n || s_cor < 0 || s_cor > spec.m)
    throw std::domain_error("assemble: sparsities out of bounds");

  RngState rng_matrix(derive_seed(seed, kTagMatrix));
  RngState rng_signal(derive_seed(seed, kTagSignal));
  RngState rng_corruption(derive_seed(seed, kTagCorruption));
  RngState rng_noise(derive_seed(seed, kTagNoise));

  ProblemInstance p;
  p.spec = spec;
  p.seed = seed;
  p.phi = draw_sensing_matrix(rng_matrix, spec);
  p.x_true = draw_sparse(rng_signal, spec.n, s_sig);
  p.v_true = draw_sparse(rng_corruption, spec.m, s_cor);
  p.z = draw_noise(rng_noise, spec.m, spec);
  p.delta = spec.noise == NoiseFamily::BoundedScaled ? spec.delta : 0.0;
  p.y = p.phi * p.x_true.dense() + p.v_true.dense() + p.z;
  return p;
}

double relative_error(const Vector& x_hat, const Vector& x_true) {
  if (x_hat.size() != x_true.size())
    throw std::domain_error("relative_error: dimension mismatch");
  const double denom = x_true.norm();
  const double num = (x_hat - x_true).norm();
  if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

double joint_error(const Vector& x_hat, const Vector& v_hat, const Vector& x_true,
                   const Vector& v_true) {
  if (x_hat.size() != x_true.size() || v_hat.size() != v_true.size())
    throw std::domain_error("joint_error: dimension mismatch");
  return std::sqrt((x_hat - x_true).squaredNorm() + (v_hat - v_true).squaredNorm());
}

void save_instance(const ProblemInstance& p, std::ostream& out) {
  out << "m=" << p.phi.rows() << "\n";
  out << "n=" << p.phi.cols() << "\n";
  out << "delta=";
  write_double(out, p.delta);
  out << "\n";
  out << "family=" << to_string(p.spec.family) << "\n";
  for (Eigen::Index i = 0; i < p.phi.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.phi.cols(); ++j) {
      if (j > 0) out << ' ';
      write_double(out, p.phi(i, j));
    }
    out << "\n";
  }
  auto write_vector = [&](const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i > 0) out << ' ';
      write_double(out, v[i]);
    }
    out << "\n";
  };
  write_vector(p.x_true.dense());
  write_vector(p.v_true.dense());
  write_vector(p.z);
  write_vector(p.y);
}

ProblemInstance load_instance(std::istream& in) {
  ProblemInstance p;
  const int m = std::stoi(header_value(in, "m="));
  const int n = std::stoi(header_value(in, "n="));
  const std::string delta_text = header_value(in, "delta=");
  double delta = 0.0;
  {
    auto res = std::from_chars(delta_text.data(), delta_text.data() + delta_text.size(), delta);
    if (res.ec != std::errc{})
      throw std::runtime_error("instance parse: bad delta: " + delta_text);
  }
  const MatrixFamily family = matrix_family_from_string(header_value(in, "family="));
  if (m < 1 || n < 1) throw std::runtime_error("instance parse: bad dimensions");

  p.phi.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) p.phi(i, j) = read_double(in, "phi");

  auto read_sparse = [&](int dim) {
    SparseSignal s;
    s.dim = dim;
    std::vector<double> vals;
    for (int i = 0; i < dim; ++i) {
      const double v = read_double(in, "sparse vector");
      if (v != 0.0) {
        s.support.push_back(i);
        vals.push_back(v);
      }
    }
    s.values = Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return s;
  };
  p.x_true = read_sparse(n);
  p.v_true = read_sparse(m);
  p.z.resize(m);
  for (int i = 0; i < m; ++i) p.z[i] = read_double(in, "z");
  p.y.resize(m);
  for (int i = 0; i < m; ++i) p.y[i] = read_double(in, "y");

  p.delta = delta;
  p.spec.family = family;
  p.spec.m = m;
  p.spec.n = n;
  p.spec.delta = delta;
  p.spec.noise = delta > 0.0 ? NoiseFamily::BoundedScaled : NoiseFamily::None;
  return p;
}

void save_instance_file(const ProblemInstance& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  save_instance(p, out);
}

ProblemInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return load_instance(in);
}

}  // namespace csense
