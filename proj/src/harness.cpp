#include "csense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "csense/regularization.hpp"

namespace csense {

namespace {

constexpr double kSuccessThreshold = 1e-3;
constexpr double kNoiselessTau = 1e-5;
constexpr double kSweepBeta = 2.0;  // C'K = 1, beta = 2 convention

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    throw ConfigError("config key '" + key + "': bad integer '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    throw ConfigError("config key '" + key + "': bad number '" + value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    throw ConfigError("config key '" + key + "': bad seed '" + value + "'");
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct TrialOutcome {
  bool success = false;
  bool converged = false;
  double joint_err = 0.0;
};

TrialOutcome run_trial(const EnsembleSpec& ens, int s_sig, int s_cor,
                       std::uint64_t trial_seed, ParamPolicy policy, double lambda_star,
                       double tol, int max_iter) {
  const ProblemInstance inst = assemble(trial_seed, ens, s_sig, s_cor);

  SolveConfig cfg;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  cfg.delta = inst.delta;
  cfg.procedure = procedure_for_policy(policy);
  switch (policy) {
    case ParamPolicy::ExactKappa:
      cfg.kappa_f = inst.x_true.l1_norm();
      break;
    case ParamPolicy::LambdaStar:
      cfg.lambda = lambda_star;
      break;
    case ParamPolicy::LambdaOne:
      cfg.lambda = 1.0;
      break;
    case ParamPolicy::TauSmall:
      cfg.tau1 = cfg.tau2 = kNoiselessTau;
      break;
    case ParamPolicy::TauVD: {
      auto [t1, t2] = tau_simplified_bounded(std::max(inst.delta, kNoiselessTau / kSweepBeta),
                                             kSweepBeta);
      cfg.tau1 = t1;
      cfg.tau2 = t2;
      break;
    }
    case ParamPolicy::TauOne:
      cfg.tau1 = cfg.tau2 = 1.0;
      break;
  }

  const SolveReport report = solve(inst, cfg);
  TrialOutcome out;
  out.converged = report.converged;
  const Vector x_star = inst.x_true.dense();
  const Vector v_star = inst.v_true.dense();
  out.joint_err = joint_error(report.x_hat, report.v_hat, x_star, v_star);
  out.success =
      report.converged && relative_error(report.x_hat, x_star) <= kSuccessThreshold;
  return out;
}

}  // namespace

std::string to_string(ParamPolicy p) {
  switch (p) {
    case ParamPolicy::ExactKappa: return "exact-kappa";
    case ParamPolicy::LambdaStar: return "lambda-star";
    case ParamPolicy::LambdaOne: return "lambda-1";
    case ParamPolicy::TauSmall: return "tau-small";
    case ParamPolicy::TauVD: return "tau-vd";
    case ParamPolicy::TauOne: return "tau-1";
  }
  return "?";
}

ParamPolicy policy_from_string(const std::string& s) {
  if (s == "exact-kappa") return ParamPolicy::ExactKappa;
  if (s == "lambda-star") return ParamPolicy::LambdaStar;
  if (s == "lambda-1") return ParamPolicy::LambdaOne;
  if (s == "tau-small") return ParamPolicy::TauSmall;
  if (s == "tau-vd") return ParamPolicy::TauVD;
  if (s == "tau-1") return ParamPolicy::TauOne;
  throw ConfigError("unknown policy: " + s);
}

Procedure procedure_for_policy(ParamPolicy p) {
  switch (p) {
    case ParamPolicy::ExactKappa: return Procedure::ConstrainedCorruption;
    case ParamPolicy::LambdaStar:
    case ParamPolicy::LambdaOne: return Procedure::PartiallyPenalized;
    default: return Procedure::FullyPenalized;
  }
}

void GridSpec::validate() const {
  if (m < 1 || n < 1) throw ConfigError("grid: m, n must be >= 1");
  if (trials < 1) throw ConfigError("grid: trials must be >= 1");
  if (s_sig_stride < 1 || s_cor_stride < 1) throw ConfigError("grid: strides must be >= 1");
  if (s_sig_min < 0 || s_sig_max > n || s_sig_min > s_sig_max)
    throw ConfigError("grid: signal sparsity range out of [0, n]");
  if (s_cor_min < 0 || s_cor_max > m || s_cor_min > s_cor_max)
    throw ConfigError("grid: corruption sparsity range out of [0, m]");
}

void SweepSpec::validate() const {
  if (m < 1 || n < 1) throw ConfigError("sweep: m, n must be >= 1");
  if (trials < 1) throw ConfigError("sweep: trials must be >= 1");
  if (s_sig < 0 || s_sig > n || s_cor < 0 || s_cor > m)
    throw ConfigError("sweep: sparsities out of range");
  if (deltas.empty()) throw ConfigError("sweep: needs at least one delta");
  for (double d : deltas)
    if (d < 0.0) throw ConfigError("sweep: deltas must be >= 0");
}

void parallel_for_indexed(std::size_t count, int threads,
                          const std::function<void(std::size_t)>& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

PhaseGridResult run_phase_grid(const GridSpec& spec) {
  spec.validate();
  PhaseGridResult result;
  result.spec = spec;

  std::vector<std::pair<int, int>> cells;
  for (int s_sig = spec.s_sig_min; s_sig <= spec.s_sig_max; s_sig += spec.s_sig_stride)
    for (int s_cor = spec.s_cor_min; s_cor <= spec.s_cor_max; s_cor += spec.s_cor_stride)
      cells.emplace_back(s_sig, s_cor);

  EnsembleSpec ens;
  ens.family = spec.family;
  ens.m = spec.m;
  ens.n = spec.n;
  ens.noise = NoiseFamily::None;

  result.cells.resize(cells.size());
  parallel_for_indexed(cells.size(), spec.threads, [&](std::size_t idx) {
    const auto [s_sig, s_cor] = cells[idx];
    CellResult cell;
    cell.s_sig = s_sig;
    cell.s_cor = s_cor;
    cell.trials = spec.trials;

    // lambda* depends on the cell's sparsity pair; recomputed per cell.
    double lambda_star = 1.0;
    if (spec.policy == ParamPolicy::LambdaStar)
      lambda_star = select_lambda(spec.n, s_sig, spec.m, s_cor).lambda_star;

    double err_sum = 0.0;
    for (int trial = 0; trial < spec.trials; ++trial) {
      const std::uint64_t cell_seed = derive_seed(
          derive_seed(derive_seed(spec.base_seed, static_cast<std::uint64_t>(s_sig)),
                      static_cast<std::uint64_t>(s_cor)),
          static_cast<std::uint64_t>(trial));
      const TrialOutcome outcome = run_trial(ens, s_sig, s_cor, cell_seed, spec.policy,
                                             lambda_star, spec.tol, spec.max_iter);
      if (outcome.success) ++cell.successes;
      if (!outcome.converged) ++cell.nonconverged;
      err_sum += outcome.joint_err;
    }
    cell.mean_error = err_sum / spec.trials;
    result.cells[idx] = cell;
  });

  for (const auto& cell : result.cells) result.total_nonconverged += cell.nonconverged;
  result.threshold = threshold_curve(spec.m, spec.n);
  return result;
}

SweepResult run_stable_sweep(const SweepSpec& spec_in) {
  SweepSpec spec = spec_in;
  if (spec.policies.empty())
    spec.policies = {ParamPolicy::ExactKappa, ParamPolicy::LambdaStar,
                     ParamPolicy::LambdaOne, ParamPolicy::TauVD, ParamPolicy::TauOne};
  spec.validate();

  SweepResult result;
  result.spec = spec;

  const double lambda_star =
      select_lambda(spec.n, spec.s_sig, spec.m, spec.s_cor).lambda_star;

  struct Task {
    double delta;
    ParamPolicy policy;
  };
  std::vector<Task> tasks;
  for (double delta : spec.deltas)
    for (ParamPolicy policy : spec.policies) tasks.push_back({delta, policy});

  result.rows.resize(tasks.size());
  parallel_for_indexed(tasks.size(), spec.threads, [&](std::size_t idx) {
    const Task task = tasks[idx];
    EnsembleSpec ens;
    ens.family = spec.family;
    ens.m = spec.m;
    ens.n = spec.n;
    ens.noise = task.delta > 0.0 ? NoiseFamily::BoundedScaled : NoiseFamily::None;
    ens.delta = task.delta;

    SweepRow row;
    row.delta = task.delta;
    row.policy = task.policy;
    row.procedure = procedure_for_policy(task.policy);

    std::vector<double> errors(static_cast<std::size_t>(spec.trials));
    for (int trial = 0; trial < spec.trials; ++trial) {
      // The instance seed depends only on (delta, trial): at a fixed
      // noise level every policy sees the same directions.
      const std::uint64_t trial_seed = derive_seed(
          derive_seed(spec.base_seed,
                      static_cast<std::uint64_t>(std::llround(task.delta * 4096.0))),
          static_cast<std::uint64_t>(trial));
      const TrialOutcome outcome =
          run_trial(ens, spec.s_sig, spec.s_cor, trial_seed, task.policy, lambda_star,
                    spec.tol, spec.max_iter);
      errors[static_cast<std::size_t>(trial)] = outcome.joint_err;
      if (!outcome.converged) ++row.nonconverged;
      row.mean_error += outcome.joint_err;
    }
    row.mean_error /= spec.trials;
    double ss = 0.0;
    for (double e : errors) ss += (e - row.mean_error) * (e - row.mean_error);
    row.std_error = spec.trials > 1 ? std::sqrt(ss / (spec.trials - 1)) : 0.0;
    result.rows[idx] = row;
  });

  for (const auto& row : result.rows) result.total_nonconverged += row.nonconverged;
  return result;
}

std::string to_csv(const PhaseGridResult& result) {
  std::ostringstream out;
  out << "s_sig,s_cor,successes,trials,mean_error\n";
  for (const auto& cell : result.cells) {
    out << cell.s_sig << ',' << cell.s_cor << ',' << cell.successes << ','
        << cell.trials << ',' << format_double(cell.mean_error) << "\n";
  }
  out << "# nonconverged=" << result.total_nonconverged << "\n";
  return out.str();
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "delta,procedure,policy,mean_error,std_error\n";
  for (const auto& row : result.rows) {
    out << format_double(row.delta) << ',' << to_string(row.procedure) << ','
        << to_string(row.policy) << ',' << format_double(row.mean_error) << ','
        << format_double(row.std_error) << "\n";
  }
  out << "# nonconverged=" << result.total_nonconverged << "\n";
  return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
}

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::vector<std::string>& allowed) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value: '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path,
                                                     const std::vector<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), allowed);
}

const std::vector<std::string> kGridConfigKeys = {
    "m",          "n",          "trials",      "seed",       "policy",
    "family",     "s_sig_min",  "s_sig_max",   "s_sig_stride",
    "s_cor_min",  "s_cor_max",  "s_cor_stride", "tol",       "max_iter",
    "threads"};

const std::vector<std::string> kSweepConfigKeys = {
    "m",      "n",       "trials", "seed",    "policies", "family", "s_sig",
    "s_cor",  "deltas",  "tol",    "max_iter", "threads"};

std::map<std::string, std::string> GridSpec::to_config() const {
  std::map<std::string, std::string> kv;
  kv["m"] = std::to_string(m);
  kv["n"] = std::to_string(n);
  kv["trials"] = std::to_string(trials);
  kv["seed"] = std::to_string(base_seed);
  kv["policy"] = csense::to_string(policy);
  kv["family"] = csense::to_string(family);
  kv["s_sig_min"] = std::to_string(s_sig_min);
  kv["s_sig_max"] = std::to_string(s_sig_max);
  kv["s_sig_stride"] = std::to_string(s_sig_stride);
  kv["s_cor_min"] = std::to_string(s_cor_min);
  kv["s_cor_max"] = std::to_string(s_cor_max);
  kv["s_cor_stride"] = std::to_string(s_cor_stride);
  kv["tol"] = format_double(tol);
  kv["max_iter"] = std::to_string(max_iter);
  kv["threads"] = std::to_string(threads);
  return kv;
}

GridSpec GridSpec::from_config(const std::map<std::string, std::string>& kv) {
  GridSpec spec;
  bool have_sig_max = false, have_cor_max = false;
  for (const auto& [key, value] : kv) {
    if (key == "m") spec.m = parse_int(key, value);
    else if (key == "n") spec.n = parse_int(key, value);
    else if (key == "trials") spec.trials = parse_int(key, value);
    else if (key == "seed") spec.base_seed = parse_u64(key, value);
    else if (key == "policy") spec.policy = policy_from_string(value);
    else if (key == "family") spec.family = matrix_family_from_string(value);
    else if (key == "s_sig_min") spec.s_sig_min = parse_int(key, value);
    else if (key == "s_sig_max") { spec.s_sig_max = parse_int(key, value); have_sig_max = true; }
    else if (key == "s_sig_stride") spec.s_sig_stride = parse_int(key, value);
    else if (key == "s_cor_min") spec.s_cor_min = parse_int(key, value);
    else if (key == "s_cor_max") { spec.s_cor_max = parse_int(key, value); have_cor_max = true; }
    else if (key == "s_cor_stride") spec.s_cor_stride = parse_int(key, value);
    else if (key == "tol") spec.tol = parse_double(key, value);
    else if (key == "max_iter") spec.max_iter = parse_int(key, value);
    else if (key == "threads") spec.threads = parse_int(key, value);
  }
  if (!have_sig_max) spec.s_sig_max = spec.n;
  if (!have_cor_max) spec.s_cor_max = spec.m;
  spec.validate();
  return spec;
}

SweepSpec SweepSpec::from_config(const std::map<std::string, std::string>& kv) {
  SweepSpec spec;
  for (const auto& [key, value] : kv) {
    if (key == "m") spec.m = parse_int(key, value);
    else if (key == "n") spec.n = parse_int(key, value);
    else if (key == "trials") spec.trials = parse_int(key, value);
    else if (key == "seed") spec.base_seed = parse_u64(key, value);
    else if (key == "family") spec.family = matrix_family_from_string(value);
    else if (key == "s_sig") spec.s_sig = parse_int(key, value);
    else if (key == "s_cor") spec.s_cor = parse_int(key, value);
    else if (key == "tol") spec.tol = parse_double(key, value);
    else if (key == "max_iter") spec.max_iter = parse_int(key, value);
    else if (key == "threads") spec.threads = parse_int(key, value);
    else if (key == "deltas") {
      std::istringstream ds(value);
      std::string token;
      while (ds >> token) spec.deltas.push_back(parse_double(key, token));
    } else if (key == "policies") {
      std::istringstream ps(value);
      std::string token;
      while (ps >> token) spec.policies.push_back(policy_from_string(token));
    }
  }
  if (spec.deltas.empty())
    spec.deltas = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  spec.validate();
  return spec;
}

std::string grid_config_text(const GridSpec& spec) {
  std::ostringstream out;
  for (const auto& [key, value] : spec.to_config()) out << key << " = " << value << "\n";
  return out.str();
}

}  // namespace csense
