#include "qpd/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "qpd/classical_ref.hpp"
#include "qpd/hamsim.hpp"
#include "qpd/random_problems.hpp"
#include "qpd/validate.hpp"

namespace qpd {

namespace {

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

PolynomialProblem resolve_problem(const ExperimentConfig& cfg,
                                  Eigen::VectorXd* x0, double* eta, int* T) {
  PolynomialProblem P;
  if (!cfg.preset.empty()) {
    FigurePreset fp = figure_preset(cfg.preset);
    P = fp.problem;
    if (x0) *x0 = fp.x0;
    if (eta) *eta = fp.eta;
    if (T) *T = fp.T;
  } else if (!cfg.problem_path.empty()) {
    P = load_problem_file(cfg.problem_path);
    if (x0) {
      if (!cfg.x0.empty()) {
        if (static_cast<int>(cfg.x0.size()) != P.hom.N)
          throw std::invalid_argument("--x0 has wrong dimension");
        Eigen::VectorXd v =
            Eigen::Map<const Eigen::VectorXd>(cfg.x0.data(), cfg.x0.size());
        *x0 = v / v.norm();
      } else {
        *x0 = Eigen::VectorXd::Constant(P.hom.N,
                                        1.0 / std::sqrt(double(P.hom.N)));
      }
    }
  } else {
    throw std::invalid_argument("either --problem or a preset name is required");
  }
  if (x0 && !cfg.x0.empty() && !cfg.preset.empty()) {
    Eigen::VectorXd v =
        Eigen::Map<const Eigen::VectorXd>(cfg.x0.data(), cfg.x0.size());
    *x0 = v / v.norm();
  }
  return P;
}

void metadata(std::ostream& out, const ExperimentConfig& cfg,
              const std::vector<std::pair<std::string, std::string>>& extra) {
  out << "# command=" << cfg.command << "\n";
  if (!cfg.problem_path.empty()) out << "# problem=" << cfg.problem_path << "\n";
  if (!cfg.preset.empty()) out << "# preset=" << cfg.preset << "\n";
  out << "# seed=" << cfg.seed << "\n";
  for (const auto& [k, v] : extra) out << "# " << k << "=" << v << "\n";
}

void write_trajectory_rows(std::ostream& out, const std::string& method,
                           const std::string& mode, const Eigen::VectorXd& x0,
                           double f0,
                           const std::vector<Eigen::VectorXd>& states,
                           const std::vector<double>& objectives,
                           const std::vector<double>& success,
                           const std::vector<double>& C,
                           const std::vector<double>& eps,
                           const std::vector<double>& samples) {
  auto row = [&](int step, const Eigen::VectorXd& x, double f, double pr,
                 double c, double e, double sm) {
    out << step << "," << method << "," << mode << "," << g(f) << "," << g(pr)
        << "," << g(c) << "," << g(e) << "," << g(sm);
    for (long i = 0; i < x.size(); ++i) out << "," << g(x(i));
    out << "\n";
  };
  row(0, x0, f0, 1.0, 1.0, 0.0, 1.0);
  for (std::size_t t = 0; t < states.size(); ++t)
    row(static_cast<int>(t) + 1, states[t], objectives[t], success[t], C[t],
        eps[t], samples[t]);
}

std::string trajectory_header(int N) {
  std::string h =
      "step,method,mode,objective,success_prob,C,epsilon_accum,samples_consumed";
  for (int i = 0; i < N; ++i) h += ",x" + std::to_string(i);
  return h + "\n";
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& diag) {
  Eigen::VectorXd x0;
  double preset_eta = cfg.eta.empty() ? 0.05 : cfg.eta[0];
  int T = cfg.steps;
  PolynomialProblem P = resolve_problem(cfg, &x0, &preset_eta, &T);
  if (!cfg.preset.empty() && cfg.steps > 0) T = cfg.steps;
  std::vector<double> etas = cfg.eta;
  if (etas.empty()) etas = {preset_eta};

  out << trajectory_header(P.hom.N);
  if (cfg.mode == "classical") {
    ClassicalTrajectory traj;
    if (cfg.method == "gd") {
      traj = projected_gradient_descent(P, x0, etas, T);
    } else if (cfg.method == "newton" || cfg.method == "newton-sf") {
      traj = projected_newton(P, x0, etas, T, cfg.method == "newton-sf",
                              cfg.lambda_cut);
    } else {
      diag << "unknown method '" << cfg.method << "'\n";
      return 2;
    }
    std::vector<Eigen::VectorXd> states(traj.points.begin() + 1,
                                        traj.points.end());
    std::vector<double> objs(traj.objectives.begin() + 1,
                             traj.objectives.end());
    std::vector<double> ones(states.size(), 1.0), zeros(states.size(), 0.0);
    std::vector<double> Cs(states.size());
    for (std::size_t t = 0; t < states.size(); ++t) {
      double e = etas.size() == 1 ? etas[0] : etas[t];
      Eigen::VectorXd prev = traj.points[t];
      Eigen::VectorXd gvec = gradient_classical(P, prev);
      if (cfg.method != "gd") {
        Eigen::MatrixXcd Hinv = wc_pseudo_inverse(
            hessian_classical(P, prev).cast<Cplx>(),
            cfg.lambda_cut > 0.0 ? cfg.lambda_cut
                                 : std::max(norm_bounds(P).lambda_H / 32.0, 1e-12),
            cfg.method == "newton-sf");
        gvec = (Hinv * gvec.cast<Cplx>()).real();
      }
      Cs[t] = (prev - e * gvec).norm();
    }
    write_trajectory_rows(out, cfg.method, cfg.mode, x0,
                          evaluate(P, x0), states, objs, ones, Cs, zeros,
                          std::vector<double>(states.size(), 0.0));
  } else {
    Method m = cfg.method == "gd" ? Method::gradient
               : cfg.method == "newton" ? Method::newton
               : cfg.method == "newton-sf" ? Method::newton_saddle_free
                                           : Method::gradient;
    if (cfg.method != "gd" && cfg.method != "newton" && cfg.method != "newton-sf") {
      diag << "unknown method '" << cfg.method << "'\n";
      return 2;
    }
    NormBounds nb = norm_bounds(P);
    StepConfig sc;
    sc.method = m;
    sc.rng_seed = cfg.seed;
    sc.pe.lambda_cut = cfg.lambda_cut;
    sc.epsilon_step = 0.0;
    if (cfg.mode == "ideal") {
      sc.backend = OperatorBackend::analytic;
      sc.pe.mode = PEMode::ideal;
      sc.pe.epsilon = 0.0;
    } else if (cfg.mode == "circuit") {
      sc.backend = OperatorBackend::analytic;
      sc.pe.mode = PEMode::circuit;
      sc.pe.bits = cfg.pe_bits;
      double lam = std::max({nb.lambda_D, nb.lambda_H, 1e-9});
      sc.pe.t0 = M_PI * (1.0 - std::pow(2.0, 1 - cfg.pe_bits)) / lam;
      sc.epsilon_step = sc.pe.circuit_resolution();
    } else if (cfg.mode == "sampled") {
      sc.backend = OperatorBackend::sampled_channel;
      sc.pe.mode = PEMode::ideal;
      sc.beta = cfg.beta;
      sc.channel_steps = cfg.trotter_m;
    } else {
      diag << "unknown mode '" << cfg.mode << "'\n";
      return 2;
    }
    std::vector<StepConfig> schedule;
    for (int t = 0; t < T; ++t) {
      StepConfig s = sc;
      s.eta = etas.size() == 1 ? etas[0] : etas.at(t);
      schedule.push_back(s);
    }
    DescentTrajectory traj = run_descent(P, x0.cast<Cplx>(), schedule);
    std::vector<Eigen::VectorXd> states;
    std::vector<double> objs, succ, Cs, eps, samples;
    for (const auto& r : traj.steps) {
      states.push_back(r.state_after.real());
      objs.push_back(r.objective);
      succ.push_back(r.success_prob);
      Cs.push_back(r.C);
      eps.push_back(r.epsilon_accum);
      samples.push_back(static_cast<double>(r.samples_consumed));
    }
    write_trajectory_rows(out, cfg.method, cfg.mode, x0, evaluate(P, x0),
                          states, objs, succ, Cs, eps, samples);
  }
  metadata(out, cfg,
           {{"method", cfg.method},
            {"mode", cfg.mode},
            {"steps", std::to_string(T)},
            {"eta", g(etas[0])}});
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& diag) {
  Eigen::VectorXd x0;
  PolynomialProblem P = resolve_problem(cfg, &x0, nullptr, nullptr);
  if (!P.homogeneous()) {
    diag << "sweep runs on the homogeneous form only\n";
    return 1;
  }
  EvolveWhich which = cfg.which == "H1" ? EvolveWhich::H1 : EvolveWhich::D;
  out << "m,beta,tau,repetition,trace_distance,samples_consumed,seed\n";
  Rng root(cfg.seed);
  for (int m : cfg.sweep_m) {
    for (std::size_t bi = 0; bi < cfg.sweep_beta.size(); ++bi) {
      double beta = cfg.sweep_beta[bi];
      for (int rep = 0; rep < cfg.reps; ++rep) {
        EvolutionConfig ec;
        ec.tau = cfg.tau;
        ec.trotter_steps = m;
        ec.backend = SimBackend::exact;
        ec.error_beta = beta;
        std::uint64_t rep_seed =
            root.substream("sweep", (static_cast<std::uint64_t>(m) << 32) ^
                                        (bi << 20) ^ rep)
                .seed();
        ec.rng_seed = rep_seed;
        ChannelResult cr = sample_evolution(P.hom, x0, ec, which);
        out << m << "," << g(beta) << "," << g(cfg.tau) << "," << rep << ","
            << g(cr.trace_distance) << "," << cr.samples_consumed << ","
            << rep_seed << "\n";
      }
    }
  }
  metadata(out, cfg,
           {{"which", cfg.which},
            {"tau", g(cfg.tau)},
            {"reps", std::to_string(cfg.reps)}});
  return 0;
}

int cmd_resources(const ExperimentConfig& cfg, std::ostream& out,
                  std::ostream& diag) {
  (void)diag;
  ResourceEstimate r = estimate_resources(cfg.resources);
  out << "quantity,value\n";
  out << "copies_sim_D," << g(r.copies_sim_D) << "\n";
  out << "queries_sim_D," << g(r.queries_sim_D) << "\n";
  out << "gates_sim_D," << g(r.gates_sim_D) << "\n";
  out << "copies_step," << g(r.copies_step) << "\n";
  out << "queries_step," << g(r.queries_step) << "\n";
  out << "gates_step," << g(r.gates_step) << "\n";
  out << "copies_multi_step," << g(r.copies_multi_step) << "\n";
  metadata(out, cfg, {{"caveat", r.caveat}});
  return 0;
}

int cmd_figures(const ExperimentConfig& cfg, std::ostream& out,
                std::ostream& diag) {
  std::string name = cfg.preset.empty() ? "fig2" : cfg.preset;
  FigurePreset fp;
  try {
    fp = figure_preset(name);
  } catch (const std::exception& e) {
    diag << e.what() << "\n";
    return 2;
  }
  int T = cfg.steps > 0 && cfg.steps != 100 ? cfg.steps : fp.T;
  out << trajectory_header(fp.problem.hom.N);
  for (const char* method : {"gd", "newton"}) {
    ClassicalTrajectory traj =
        std::string(method) == "gd"
            ? projected_gradient_descent(fp.problem, fp.x0, {fp.eta}, T)
            : projected_newton(fp.problem, fp.x0, {fp.eta}, T, false,
                               cfg.lambda_cut);
    std::vector<Eigen::VectorXd> states(traj.points.begin() + 1,
                                        traj.points.end());
    std::vector<double> objs(traj.objectives.begin() + 1,
                             traj.objectives.end());
    std::vector<double> ones(states.size(), 1.0), zeros(states.size(), 0.0);
    write_trajectory_rows(out, std::string(method) == "gd" ? "pgd" : "pnewton",
                          "classical", fp.x0, traj.objectives[0], states, objs,
                          ones, ones, zeros, zeros);
  }
  metadata(out, cfg, {{"figure", name}, {"eta", g(fp.eta)}, {"T", std::to_string(T)}});
  return 0;
}

int cmd_validate(const ExperimentConfig& cfg, std::ostream& out,
                 std::ostream& diag) {
  struct Target {
    std::string name;
    PolynomialProblem problem;
  };
  std::vector<Target> targets;
  if (!cfg.problem_path.empty()) {
    targets.push_back({cfg.problem_path, load_problem_file(cfg.problem_path)});
  } else if (!cfg.preset.empty()) {
    targets.push_back({cfg.preset, figure_preset(cfg.preset).problem});
  } else {
    for (const char* f : {"fig1", "fig2", "fig3"})
      targets.push_back({f, figure_preset(f).problem});
    Rng rng = Rng(cfg.seed).substream("validate-problems");
    for (int i = 0; i < cfg.random_problems; ++i) {
      int p = 1 + static_cast<int>(rng.integer(2));
      int n = 1 + static_cast<int>(rng.integer(2));
      bool inhom = rng.bernoulli(0.3);
      targets.push_back({"random-" + std::to_string(i),
                         random_problem(rng, p, n, inhom)});
    }
  }

  out << "problem,check,pass,detail\n";
  int failures = 0;
  for (const auto& t : targets) {
    auto results = validate_problem(t.problem, cfg.seed);
    for (const auto& r : results) {
      if (!r.pass) ++failures;
      out << t.name << "," << r.name << "," << (r.pass ? "PASS" : "FAIL") << ","
          << r.detail << "\n";
      diag << (r.pass ? "PASS " : "FAIL ") << t.name << " " << r.name << " ("
           << r.detail << ")\n";
    }
  }
  metadata(out, cfg,
           {{"targets", std::to_string(targets.size())},
            {"failures", std::to_string(failures)}});
  return failures == 0 ? 0 : 1;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& csv,
                   std::ostream& diag) {
  try {
    if (cfg.command == "run") return cmd_run(cfg, csv, diag);
    if (cfg.command == "sweep") return cmd_sweep(cfg, csv, diag);
    if (cfg.command == "resources") return cmd_resources(cfg, csv, diag);
    if (cfg.command == "figures") return cmd_figures(cfg, csv, diag);
    if (cfg.command == "validate") return cmd_validate(cfg, csv, diag);
  } catch (const ParseError& e) {
    diag << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    diag << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    return 1;
  }
  diag << "unknown command '" << cfg.command << "'\n";
  return 2;
}

}  // namespace qpd
