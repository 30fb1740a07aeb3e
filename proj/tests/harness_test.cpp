#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>

#include "csense/harness.hpp"

using namespace csense;

namespace {

GridSpec tiny_grid() {
  GridSpec spec;
  spec.m = 24;
  spec.n = 24;
  spec.s_sig_min = 0;
  spec.s_sig_max = 12;
  spec.s_sig_stride = 4;
  spec.s_cor_min = 0;
  spec.s_cor_max = 12;
  spec.s_cor_stride = 4;
  spec.trials = 3;
  spec.policy = ParamPolicy::ExactKappa;
  spec.base_seed = 5;
  spec.tol = 1e-6;
  spec.max_iter = 3000;
  spec.threads = 2;
  return spec;
}

}  // namespace

TEST_CASE("config parsing round trips a grid spec") {
  GridSpec spec = tiny_grid();
  const std::string text = grid_config_text(spec);
  const GridSpec parsed = GridSpec::from_config(parse_config_text(text, kGridConfigKeys));
  CHECK(parsed.m == spec.m);
  CHECK(parsed.n == spec.n);
  CHECK(parsed.trials == spec.trials);
  CHECK(parsed.base_seed == spec.base_seed);
  CHECK(parsed.policy == spec.policy);
  CHECK(parsed.family == spec.family);
  CHECK(parsed.s_sig_min == spec.s_sig_min);
  CHECK(parsed.s_sig_max == spec.s_sig_max);
  CHECK(parsed.s_sig_stride == spec.s_sig_stride);
  CHECK(parsed.s_cor_stride == spec.s_cor_stride);
  CHECK(parsed.tol == spec.tol);
  CHECK(parsed.max_iter == spec.max_iter);
}

TEST_CASE("config parser names unknown keys and bad lines") {
  CHECK_THROWS_WITH_AS(parse_config_text("bogus_key = 3\n", kGridConfigKeys),
                       doctest::Contains("bogus_key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("m 64\n", kGridConfigKeys),
                       doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_WITH_AS(
      GridSpec::from_config(parse_config_text("m = sixty\n", kGridConfigKeys)),
      doctest::Contains("m"), ConfigError);
  // comments and blanks are fine
  const auto kv = parse_config_text("# header\n\nm = 32 # inline\n", kGridConfigKeys);
  CHECK(kv.at("m") == "32");
}

TEST_CASE("grid validation rejects bad ranges") {
  GridSpec spec = tiny_grid();
  spec.s_sig_max = 100;  // beyond n
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = tiny_grid();
  spec.s_cor_stride = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = tiny_grid();
  spec.trials = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("phase grid covers the cells and zero cell always succeeds") {
  const GridSpec spec = tiny_grid();
  const PhaseGridResult result = run_phase_grid(spec);
  CHECK(result.cells.size() == 4 * 4);
  // CSV rows match cells
  const std::string csv = to_csv(result);
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == static_cast<int>(result.cells.size()) + 2);  // header + footer

  // (0, 0): zero problem, trivially recovered
  const CellResult& zero_cell = result.cells.front();
  CHECK(zero_cell.s_sig == 0);
  CHECK(zero_cell.s_cor == 0);
  CHECK(zero_cell.successes == zero_cell.trials);
  for (const auto& cell : result.cells) CHECK(cell.successes <= cell.trials);
}

TEST_CASE("phase grid is deterministic across thread counts") {
  GridSpec spec = tiny_grid();
  spec.threads = 1;
  const std::string serial = to_csv(run_phase_grid(spec));
  spec.threads = 2;
  const std::string parallel = to_csv(run_phase_grid(spec));
  CHECK(serial == parallel);
  spec.base_seed = 6;
  CHECK(to_csv(run_phase_grid(spec)) != serial);
}

TEST_CASE("deep cells behave as the threshold predicts") {
  GridSpec spec = tiny_grid();
  spec.m = 32;
  spec.n = 32;
  spec.trials = 8;
  spec.max_iter = 4000;

  // deep success: s = 1 on both axes
  spec.s_sig_min = spec.s_sig_max = 1;
  spec.s_cor_min = spec.s_cor_max = 1;
  PhaseGridResult result = run_phase_grid(spec);
  CHECK(result.cells.front().successes >= 7);

  // deep failure: s = n/2 on both axes
  spec.s_sig_min = spec.s_sig_max = 16;
  spec.s_cor_min = spec.s_cor_max = 16;
  result = run_phase_grid(spec);
  CHECK(result.cells.front().successes <= 1);
}

TEST_CASE("success trend is monotone along the diagonal on average") {
  GridSpec spec = tiny_grid();
  spec.m = 32;
  spec.n = 32;
  spec.trials = 6;
  spec.s_sig_min = 0;
  spec.s_sig_max = 16;
  spec.s_sig_stride = 4;
  spec.s_cor_min = 0;
  spec.s_cor_max = 16;
  spec.s_cor_stride = 4;
  const PhaseGridResult result = run_phase_grid(spec);
  // trend test: average success over low-total-sparsity cells beats
  // the average over high-total-sparsity cells
  double low_sum = 0.0, high_sum = 0.0;
  int low_count = 0, high_count = 0;
  for (const auto& cell : result.cells) {
    const int total = cell.s_sig + cell.s_cor;
    const double rate = static_cast<double>(cell.successes) / cell.trials;
    if (total <= 8) {
      low_sum += rate;
      ++low_count;
    } else if (total >= 24) {
      high_sum += rate;
      ++high_count;
    }
  }
  CHECK(low_sum / low_count > high_sum / high_count);
}

TEST_CASE("stable sweep rows and reproducibility") {
  SweepSpec spec;
  spec.m = 32;
  spec.n = 32;
  spec.s_sig = 3;
  spec.s_cor = 3;
  spec.deltas = {0.0, 0.5};
  spec.trials = 4;
  spec.policies = {ParamPolicy::ExactKappa, ParamPolicy::TauVD};
  spec.base_seed = 11;
  spec.tol = 1e-6;
  spec.max_iter = 4000;
  spec.threads = 2;

  const SweepResult result = run_stable_sweep(spec);
  CHECK(result.rows.size() == 4);  // one row per (delta, policy)
  const std::string csv = to_csv(result);
  CHECK(csv.rfind("delta,procedure,policy,mean_error,std_error\n", 0) == 0);

  // noiseless constrained row recovers to the success tolerance
  for (const auto& row : result.rows) {
    if (row.delta == 0.0 && row.policy == ParamPolicy::ExactKappa)
      CHECK(row.mean_error <= 1e-3 * 10.0);
    CHECK(row.std_error >= 0.0);
  }

  const SweepResult rerun = run_stable_sweep(spec);
  CHECK(to_csv(rerun) == csv);
}

TEST_CASE("policy round trips and procedure mapping") {
  for (ParamPolicy p : {ParamPolicy::ExactKappa, ParamPolicy::LambdaStar,
                        ParamPolicy::LambdaOne, ParamPolicy::TauSmall, ParamPolicy::TauVD,
                        ParamPolicy::TauOne}) {
    CHECK(policy_from_string(to_string(p)) == p);
  }
  CHECK(procedure_for_policy(ParamPolicy::ExactKappa) == Procedure::ConstrainedCorruption);
  CHECK(procedure_for_policy(ParamPolicy::LambdaStar) == Procedure::PartiallyPenalized);
  CHECK(procedure_for_policy(ParamPolicy::TauSmall) == Procedure::FullyPenalized);
  CHECK_THROWS_AS(policy_from_string("nonsense"), ConfigError);
}

TEST_CASE("parallel_for_indexed runs every index exactly once") {
  std::vector<std::atomic<int>> counts(64);
  parallel_for_indexed(64, 3, [&](std::size_t i) { counts[i].fetch_add(1); });
  for (const auto& c : counts) CHECK(c.load() == 1);

  // exceptions propagate
  CHECK_THROWS_AS(parallel_for_indexed(8, 2,
                                       [](std::size_t i) {
                                         if (i == 3) throw std::runtime_error("boom");
                                       }),
                  std::runtime_error);
}
