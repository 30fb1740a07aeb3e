// Command-line front end: instance generation, single solves, geometry
// curves, parameter selection reports, deviation experiments, and the
// phase/stable experiment harness. Exit codes: 0 on success, 1 on
// configuration errors, 2 on numerical failures.

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "csense/deviation.hpp"
#include "csense/ensemble.hpp"
#include "csense/geometry.hpp"
#include "csense/harness.hpp"
#include "csense/regularization.hpp"
#include "csense/solvers.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty() || out_path == "-") {
    std::cout << contents;
    return;
  }
  csense::write_file(out_path, contents);
}

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string config;
};

int cmd_generate(const GlobalOpts& g, int m, int n, int s_sig, int s_cor,
                 const std::string& family, const std::string& noise, double delta,
                 double noise_l, const std::string& law) {
  csense::EnsembleSpec spec;
  spec.m = m;
  spec.n = n;
  spec.family = csense::matrix_family_from_string(family);
  if (noise == "none") {
    spec.noise = csense::NoiseFamily::None;
  } else if (noise == "bounded") {
    spec.noise = csense::NoiseFamily::BoundedScaled;
    spec.delta = delta;
  } else if (noise == "subgauss") {
    spec.noise = csense::NoiseFamily::SubGaussianIID;
    spec.noise_psi2 = noise_l;
    spec.noise_law = law == "rademacher" ? csense::SubGaussianLaw::Rademacher
                                         : csense::SubGaussianLaw::Gaussian;
  } else {
    throw CLI::ValidationError("--noise", "expected none|bounded|subgauss");
  }
  const csense::ProblemInstance inst = csense::assemble(g.seed, spec, s_sig, s_cor);
  std::ostringstream text;
  csense::save_instance(inst, text);
  emit(g.out, text.str());
  return kExitOk;
}

int cmd_solve(const GlobalOpts& g, const std::string& in_path, const std::string& procedure,
              std::optional<double> kappa_f, std::optional<double> kappa_g, double lambda,
              double tau1, double tau2, std::optional<double> delta, double tol,
              int max_iter) {
  const csense::ProblemInstance inst = csense::load_instance_file(in_path);
  csense::SolveConfig cfg;
  cfg.procedure = csense::procedure_from_string(procedure);
  cfg.delta = delta.value_or(inst.delta);
  cfg.kappa_f = kappa_f.value_or(inst.x_true.l1_norm());
  cfg.kappa_g = kappa_g.value_or(inst.v_true.l1_norm());
  cfg.lambda = lambda;
  cfg.tau1 = tau1;
  cfg.tau2 = tau2;
  cfg.tol = tol;
  cfg.max_iter = max_iter;

  const csense::SolveReport report = csense::solve(inst, cfg);

  std::ostringstream out;
  out << "procedure=" << csense::to_string(cfg.procedure) << "\n";
  out << "converged=" << (report.converged ? 1 : 0) << "\n";
  out << "iterations=" << report.iterations << "\n";
  out << "objective=" << fmt(report.objective) << "\n";
  out << "relative_error_x=" << fmt(csense::relative_error(report.x_hat, inst.x_true.dense()))
      << "\n";
  out << "joint_error=" << fmt(csense::joint_error(report.x_hat, report.v_hat,
                                                   inst.x_true.dense(), inst.v_true.dense()))
      << "\n";
  out << "x_hat=";
  for (Eigen::Index i = 0; i < report.x_hat.size(); ++i)
    out << (i ? " " : "") << fmt(report.x_hat[i]);
  out << "\nv_hat=";
  for (Eigen::Index i = 0; i < report.v_hat.size(); ++i)
    out << (i ? " " : "") << fmt(report.v_hat[i]);
  out << "\n";
  emit(g.out, out.str());
  return report.converged ? kExitOk : kExitNumerical;
}

int cmd_eta2(const GlobalOpts& g, int n, int s, int points) {
  const csense::EtaProfile profile = csense::minimize_eta2(n, s);
  std::ostringstream out;
  out << "t,J\n";
  const double hi = profile.curve.back().first;
  for (int k = 0; k <= points; ++k) {
    const double t = hi * static_cast<double>(k) / points;
    out << fmt(t) << ',' << fmt(csense::eta2_closed_form_l1(n, s, t)) << "\n";
  }
  out << "# t_star=" << fmt(profile.t_star) << " j_min=" << fmt(profile.j_min) << "\n";
  emit(g.out, out.str());
  return kExitOk;
}

int cmd_lambda_star(const GlobalOpts& g, int n, int s_sig, int m, int s_cor) {
  const csense::LambdaSelection sel = csense::select_lambda(n, s_sig, m, s_cor);
  std::ostringstream out;
  out << "lambda1_star=" << fmt(sel.lambda1_star) << "\n";
  out << "lambda2_star=" << fmt(sel.lambda2_star) << "\n";
  out << "lambda_star=" << fmt(sel.lambda_star) << "\n";
  out << "eta2_sig=" << fmt(sel.profile_sig.j_min) << "\n";
  out << "eta2_cor=" << fmt(sel.profile_cor.j_min) << "\n";
  emit(g.out, out.str());
  return kExitOk;
}

int cmd_tau_star(const GlobalOpts& g, const std::string& regime, const std::string& strategy,
                 int n, int s_sig, int m, int s_cor, double delta, double beta,
                 double noise_l, double k, double c, bool simplified) {
  csense::TauInputs in;
  in.n = n;
  in.s_sig = s_sig;
  in.m = m;
  in.s_cor = s_cor;
  in.delta = delta;
  in.noise_psi2 = noise_l;
  in.beta = beta;
  in.k = k;
  in.c = c;
  in.seed = g.seed;

  csense::NoiseRegime reg;
  if (regime == "noiseless") reg = csense::NoiseRegime::Noiseless;
  else if (regime == "bounded") reg = csense::NoiseRegime::BoundedNoise;
  else if (regime == "subgauss") reg = csense::NoiseRegime::SubGaussianNoise;
  else throw CLI::ValidationError("--regime", "expected noiseless|bounded|subgauss");

  const csense::TauStrategy strat = strategy == "min-measurements"
                                        ? csense::TauStrategy::MinMeasurements
                                        : csense::TauStrategy::MinError;

  std::ostringstream out;
  if (simplified && reg == csense::NoiseRegime::BoundedNoise &&
      strat == csense::TauStrategy::MinError) {
    auto [t1, t2] = csense::tau_simplified_bounded(delta, beta);
    out << "tau1=" << fmt(t1) << "\ntau2=" << fmt(t2) << "\n";
    out << "tau1_bound=" << fmt(t1) << "\ntau2_bound=" << fmt(t2) << "\n";
  } else {
    const csense::Norm l1 = csense::Norm::l1();
    const csense::TauSelection sel = csense::select_tau(strat, reg, in, l1, l1);
    out << "tau1=" << fmt(sel.tau1) << "\ntau2=" << fmt(sel.tau2) << "\n";
    out << "tau1_bound=" << fmt(sel.tau1_bound) << "\ntau2_bound=" << fmt(sel.tau2_bound)
        << "\n";
  }
  out << "beta=" << fmt(beta) << "\n";
  emit(g.out, out.str());
  return kExitOk;
}

int cmd_threshold_curve(const GlobalOpts& g, int m, int n) {
  const auto curve = csense::threshold_curve(m, n);
  std::ostringstream out;
  out << "s_sig,s_cor\n";
  for (const auto& [s_sig, s_cor] : curve) out << s_sig << ',' << s_cor << "\n";
  emit(g.out, out.str());
  return kExitOk;
}

int cmd_deviation(const GlobalOpts& g, int m, int n, int set_size, int trials,
                  const std::string& families, const std::string& ensembles) {
  std::vector<csense::PointFamily> fams;
  {
    std::istringstream fs(families);
    std::string token;
    while (std::getline(fs, token, ',')) {
      if (token == "sphere") fams.push_back(csense::PointFamily::SphereSamples);
      else if (token == "sparse-cone") fams.push_back(csense::PointFamily::SparseCone);
      else if (token == "l1-ball") fams.push_back(csense::PointFamily::L1Ball);
      else if (token == "singleton") fams.push_back(csense::PointFamily::Singleton);
      else throw CLI::ValidationError("--families", "unknown family " + token);
    }
  }
  std::vector<csense::MatrixFamily> ens;
  {
    std::istringstream es(ensembles);
    std::string token;
    while (std::getline(es, token, ',')) ens.push_back(csense::matrix_family_from_string(token));
  }

  std::ostringstream out;
  out << "family,ensemble,size,trial,sup_dev,gamma_est,ratio\n";
  for (const auto fam : fams) {
    for (const auto e : ens) {
      const csense::DeviationReport report =
          csense::verify_theorem1(fam, e, n, m, set_size, trials, g.seed);
      for (std::size_t t = 0; t < report.sup_deviations.size(); ++t) {
        const double dev = report.sup_deviations[t];
        out << csense::to_string(fam) << ',' << csense::to_string(e) << ','
            << report.set_size << ',' << t << ',' << fmt(dev) << ','
            << fmt(report.gamma.value) << ',' << fmt(dev / report.gamma.value) << "\n";
      }
    }
  }
  emit(g.out, out.str());
  return kExitOk;
}

int cmd_phase(const GlobalOpts& g, csense::GridSpec spec, bool spec_from_config) {
  if (spec_from_config)
    spec = csense::GridSpec::from_config(
        csense::parse_config_file(g.config, csense::kGridConfigKeys));
  if (spec.threads == 0 && g.threads > 0) spec.threads = g.threads;
  if (g.seed != 1) spec.base_seed = g.seed;
  const csense::PhaseGridResult result = csense::run_phase_grid(spec);
  emit(g.out, csense::to_csv(result));
  return kExitOk;
}

int cmd_stable(const GlobalOpts& g, csense::SweepSpec spec, bool spec_from_config) {
  if (spec_from_config)
    spec = csense::SweepSpec::from_config(
        csense::parse_config_file(g.config, csense::kSweepConfigKeys));
  if (spec.threads == 0 && g.threads > 0) spec.threads = g.threads;
  if (g.seed != 1) spec.base_seed = g.seed;
  const csense::SweepResult result = csense::run_stable_sweep(spec);
  emit(g.out, csense::to_csv(result));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrupted-sensing toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "base random seed");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_option("--out", g.out, "output path ('-' = stdout)");
  app.add_option("--config", g.config, "key = value config file");

  // generate
  auto* generate = app.add_subcommand("generate", "draw a problem instance");
  int gm = 64, gn = 64, gs_sig = 5, gs_cor = 5;
  std::string gfamily = "gaussian", gnoise = "none", glaw = "gaussian";
  double gdelta = 0.0, gl = 1.0;
  generate->add_option("--m", gm);
  generate->add_option("--n", gn);
  generate->add_option("--s-sig", gs_sig);
  generate->add_option("--s-cor", gs_cor);
  generate->add_option("--family", gfamily, "gaussian|bernoulli");
  generate->add_option("--noise", gnoise, "none|bounded|subgauss");
  generate->add_option("--delta", gdelta);
  generate->add_option("--L", gl, "sub-Gaussian noise scale");
  generate->add_option("--law", glaw, "gaussian|rademacher");

  // solve
  auto* solve = app.add_subcommand("solve", "solve a serialized instance");
  std::string sin, sprocedure = "constrained-corruption";
  double slambda = 1.0, stau1 = 1e-5, stau2 = 1e-5, stol = 1e-8;
  int smax_iter = 20000;
  std::optional<double> skappa_f, skappa_g, sdelta;
  solve->add_option("--in", sin, "instance file")->required();
  solve->add_option("--procedure", sprocedure,
                    "constrained-signal|constrained-corruption|partial|full");
  solve->add_option("--kappa-f", skappa_f);
  solve->add_option("--kappa-g", skappa_g);
  solve->add_option("--lambda", slambda);
  solve->add_option("--tau1", stau1);
  solve->add_option("--tau2", stau2);
  solve->add_option("--delta", sdelta);
  solve->add_option("--tol", stol);
  solve->add_option("--max-iter", smax_iter);

  // eta2
  auto* eta2 = app.add_subcommand("eta2", "Gaussian squared distance profile CSV");
  int en = 128, es = 20, epoints = 64;
  eta2->add_option("--n", en);
  eta2->add_option("--s", es);
  eta2->add_option("--points", epoints);

  // lambda-star
  auto* lambda_star = app.add_subcommand("lambda-star", "optimal lambda report");
  int ln = 128, ls_sig = 20, lm = 128, ls_cor = 20;
  lambda_star->add_option("--n", ln);
  lambda_star->add_option("--s-sig", ls_sig);
  lambda_star->add_option("--m", lm);
  lambda_star->add_option("--s-cor", ls_cor);

  // tau-star
  auto* tau_star = app.add_subcommand("tau-star", "tau range and selection report");
  std::string tregime = "bounded", tstrategy = "min-error";
  int tn = 128, ts_sig = 20, tm = 128, ts_cor = 20;
  double tdelta = 1.0, tbeta = 2.0, tl = 1.0, tk = 1.0, tc = 1.0;
  bool tsimplified = false;
  tau_star->add_option("--regime", tregime, "noiseless|bounded|subgauss");
  tau_star->add_option("--strategy", tstrategy, "min-measurements|min-error");
  tau_star->add_option("--n", tn);
  tau_star->add_option("--s-sig", ts_sig);
  tau_star->add_option("--m", tm);
  tau_star->add_option("--s-cor", ts_cor);
  tau_star->add_option("--delta", tdelta);
  tau_star->add_option("--beta", tbeta);
  tau_star->add_option("--L", tl);
  tau_star->add_option("--K", tk);
  tau_star->add_option("--C", tc);
  tau_star->add_flag("--vd-simplified", tsimplified, "sqrt(n)+sqrt(m) shortcut, C'K = 1");

  // threshold-curve
  auto* threshold = app.add_subcommand("threshold-curve", "recovery threshold polyline CSV");
  int thm = 128, thn = 128;
  threshold->add_option("--m", thm);
  threshold->add_option("--n", thn);

  // deviation
  auto* deviation = app.add_subcommand("deviation", "matrix deviation experiment CSV");
  int dm = 64, dn = 64, dsize = 64, dtrials = 50;
  std::string dfamilies = "sphere,sparse-cone,l1-ball";
  std::string densembles = "gaussian,bernoulli";
  deviation->add_option("--m", dm);
  deviation->add_option("--n", dn);
  deviation->add_option("--set-size", dsize);
  deviation->add_option("--trials", dtrials);
  deviation->add_option("--families", dfamilies);
  deviation->add_option("--ensembles", densembles);

  // phase
  auto* phase = app.add_subcommand("phase", "phase-transition grid CSV");
  csense::GridSpec grid;
  std::string ppolicy = "exact-kappa", pfamily = "gaussian";
  phase->add_option("--m", grid.m);
  phase->add_option("--n", grid.n);
  phase->add_option("--trials", grid.trials);
  phase->add_option("--policy", ppolicy);
  phase->add_option("--family", pfamily);
  phase->add_option("--s-sig-min", grid.s_sig_min);
  phase->add_option("--s-sig-max", grid.s_sig_max)->default_val(-1);
  phase->add_option("--s-sig-stride", grid.s_sig_stride);
  phase->add_option("--s-cor-min", grid.s_cor_min);
  phase->add_option("--s-cor-max", grid.s_cor_max)->default_val(-1);
  phase->add_option("--s-cor-stride", grid.s_cor_stride);
  phase->add_option("--tol", grid.tol);
  phase->add_option("--max-iter", grid.max_iter);

  // stable
  auto* stable = app.add_subcommand("stable", "stable-recovery sweep CSV");
  csense::SweepSpec sweep;
  std::string stfamily = "gaussian", stpolicies, stdeltas;
  stable->add_option("--m", sweep.m);
  stable->add_option("--n", sweep.n);
  stable->add_option("--s-sig", sweep.s_sig);
  stable->add_option("--s-cor", sweep.s_cor);
  stable->add_option("--trials", sweep.trials);
  stable->add_option("--family", stfamily);
  stable->add_option("--policies", stpolicies, "space-separated policy list");
  stable->add_option("--deltas", stdeltas, "space-separated noise levels");
  stable->add_option("--tol", sweep.tol);
  stable->add_option("--max-iter", sweep.max_iter);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (generate->parsed())
      return cmd_generate(g, gm, gn, gs_sig, gs_cor, gfamily, gnoise, gdelta, gl, glaw);
    if (solve->parsed())
      return cmd_solve(g, sin, sprocedure, skappa_f, skappa_g, slambda, stau1, stau2,
                       sdelta, stol, smax_iter);
    if (eta2->parsed()) return cmd_eta2(g, en, es, epoints);
    if (lambda_star->parsed()) return cmd_lambda_star(g, ln, ls_sig, lm, ls_cor);
    if (tau_star->parsed())
      return cmd_tau_star(g, tregime, tstrategy, tn, ts_sig, tm, ts_cor, tdelta, tbeta,
                          tl, tk, tc, tsimplified);
    if (threshold->parsed()) return cmd_threshold_curve(g, thm, thn);
    if (deviation->parsed())
      return cmd_deviation(g, dm, dn, dsize, dtrials, dfamilies, densembles);
    if (phase->parsed()) {
      grid.policy = csense::policy_from_string(ppolicy);
      grid.family = csense::matrix_family_from_string(pfamily);
      if (grid.s_sig_max < 0) grid.s_sig_max = grid.n;
      if (grid.s_cor_max < 0) grid.s_cor_max = grid.m;
      return cmd_phase(g, grid, !g.config.empty());
    }
    if (stable->parsed()) {
      sweep.family = csense::matrix_family_from_string(stfamily);
      if (!stpolicies.empty()) {
        std::istringstream ps(stpolicies);
        std::string token;
        while (ps >> token) sweep.policies.push_back(csense::policy_from_string(token));
      }
      if (!stdeltas.empty()) {
        std::istringstream ds(stdeltas);
        double d;
        while (ds >> d) sweep.deltas.push_back(d);
      } else {
        sweep.deltas = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
      }
      return cmd_stable(g, sweep, !g.config.empty());
    }
  } catch (const csense::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CLI::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
