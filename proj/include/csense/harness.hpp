#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csense/ensemble.hpp"
#include "csense/solvers.hpp"

namespace csense {

// Parameter policy of a grid or sweep run:
//   exact-kappa : constrained program with kappa_f = f(x*) (and the true delta)
//   lambda-star : partially penalized with lambda = lambda2*/lambda1* per cell
//   lambda-1    : partially penalized with lambda = 1
//   tau-small   : fully penalized with tau1 = tau2 = 1e-5
//   tau-vd      : fully penalized with tau1 = tau2 = beta*delta (C'K = 1, beta = 2)
//   tau-1       : fully penalized with tau1 = tau2 = 1
enum class ParamPolicy { ExactKappa, LambdaStar, LambdaOne, TauSmall, TauVD, TauOne };

std::string to_string(ParamPolicy p);
ParamPolicy policy_from_string(const std::string& s);
Procedure procedure_for_policy(ParamPolicy p);

struct GridSpec {
  int m = 64;
  int n = 64;
  int s_sig_min = 0, s_sig_max = 64, s_sig_stride = 4;
  int s_cor_min = 0, s_cor_max = 64, s_cor_stride = 4;
  int trials = 20;
  ParamPolicy policy = ParamPolicy::ExactKappa;
  MatrixFamily family = MatrixFamily::Gaussian;
  std::uint64_t base_seed = 1;
  double tol = 1e-6;
  int max_iter = 6000;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
  std::map<std::string, std::string> to_config() const;
  static GridSpec from_config(const std::map<std::string, std::string>& kv);
};

struct CellResult {
  int s_sig = 0;
  int s_cor = 0;
  int successes = 0;
  int trials = 0;
  double mean_error = 0.0;  // mean joint l2 error over trials
  int nonconverged = 0;
};

struct PhaseGridResult {
  GridSpec spec;
  std::vector<CellResult> cells;                  // row-major in (s_sig, s_cor)
  std::vector<std::pair<int, int>> threshold;     // boundary polyline
  int total_nonconverged = 0;
};

// Success criterion: converged solve with ||x_hat - x*|| / ||x*|| <= 1e-3.
PhaseGridResult run_phase_grid(const GridSpec& spec);

struct SweepSpec {
  int m = 128;
  int n = 128;
  int s_sig = 20;
  int s_cor = 20;
  std::vector<double> deltas;
  int trials = 20;
  std::vector<ParamPolicy> policies;  // default: all five stable-recovery policies
  MatrixFamily family = MatrixFamily::Gaussian;
  std::uint64_t base_seed = 1;
  double tol = 1e-6;
  int max_iter = 8000;
  int threads = 0;

  void validate() const;
  static SweepSpec from_config(const std::map<std::string, std::string>& kv);
};

struct SweepRow {
  double delta = 0.0;
  Procedure procedure = Procedure::ConstrainedCorruption;
  ParamPolicy policy = ParamPolicy::ExactKappa;
  double mean_error = 0.0;
  double std_error = 0.0;
  int nonconverged = 0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;
  int total_nonconverged = 0;
};

SweepResult run_stable_sweep(const SweepSpec& spec);

// CSV emission; byte-stable across reruns and thread counts. Non-
// convergence totals go into a trailing comment line.
std::string to_csv(const PhaseGridResult& result);
std::string to_csv(const SweepResult& result);
void write_file(const std::string& path, const std::string& contents);

// Flat "key = value" config text; '#' starts a comment. Unknown keys and
// malformed lines are errors naming the key and line number.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::vector<std::string>& allowed);
std::map<std::string, std::string> parse_config_file(const std::string& path,
                                                     const std::vector<std::string>& allowed);

extern const std::vector<std::string> kGridConfigKeys;
extern const std::vector<std::string> kSweepConfigKeys;

std::string grid_config_text(const GridSpec& spec);

// Deterministic worker pool: tasks indexed 0..count-1, each writing only
// its own slot; the schedule cannot affect results.
void parallel_for_indexed(std::size_t count, int threads,
                          const std::function<void(std::size_t)>& body);

}  // namespace csense
