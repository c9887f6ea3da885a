// Command-line driver: loads problem files, runs descent experiments,
// channel-error sweeps, resource estimates and the invariant suite, and
// writes tidy CSV for external plotting.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "qpd/experiment.hpp"

namespace {

void add_common(CLI::App* cmd, qpd::ExperimentConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "root RNG seed")->envname("QPD_SEED");
  cmd->add_option("--out", cfg.out_path, "output CSV path (default stdout)");
}

int dispatch(const qpd::ExperimentConfig& cfg) {
  if (cfg.out_path.empty()) return qpd::run_experiment(cfg, std::cout, std::cerr);
  std::ofstream out(cfg.out_path);
  if (!out) {
    std::cerr << "cannot open output file: " << cfg.out_path << "\n";
    return 1;
  }
  return qpd::run_experiment(cfg, out, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale simulator for iterative quantum polynomial optimization"};
  app.require_subcommand(1);
  qpd::ExperimentConfig cfg;

  auto* run = app.add_subcommand("run", "run a descent trajectory");
  run->add_option("--problem", cfg.problem_path, "problem file");
  run->add_option("--preset", cfg.preset, "figure preset (fig1|fig2|fig3)");
  run->add_option("--method", cfg.method, "gd | newton | newton-sf");
  run->add_option("--mode", cfg.mode, "classical | ideal | circuit | sampled");
  run->add_option("--steps", cfg.steps, "number of steps T");
  run->add_option("--eta", cfg.eta, "step size (repeat for a schedule)");
  run->add_option("--x0", cfg.x0, "initial state components");
  run->add_option("--pe-bits", cfg.pe_bits, "phase register width (circuit mode)");
  run->add_option("--trotter-m", cfg.trotter_m, "channel steps (sampled mode)");
  run->add_option("--beta", cfg.beta, "copy perturbation (sampled mode)");
  run->add_option("--lambda-cut", cfg.lambda_cut, "well-conditioned cutoff");
  add_common(run, cfg);

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo channel-error sweep");
  sweep->add_option("--problem", cfg.problem_path, "problem file")->required();
  sweep->add_option("--which", cfg.which, "evolved operator: D | H1");
  sweep->add_option("--tau", cfg.tau, "total evolution time");
  sweep->add_option("--m", cfg.sweep_m, "step counts");
  sweep->add_option("--beta", cfg.sweep_beta, "perturbation magnitudes");
  sweep->add_option("--reps", cfg.reps, "Monte Carlo repetitions");
  sweep->add_option("--x0", cfg.x0, "initial state components");
  add_common(sweep, cfg);

  auto* res = app.add_subcommand("resources", "evaluate the resource formulas");
  res->add_option("--p", cfg.resources.p, "tensor order");
  res->add_option("--sA", cfg.resources.s_A, "sparsity of A");
  res->add_option("--lambda", cfg.resources.lambda, "norm bound Lambda");
  res->add_option("--lambdaD", cfg.resources.lambda_D, "gradient norm bound");
  res->add_option("--lambdaH", cfg.resources.lambda_H, "Hessian norm bound");
  res->add_option("--tau", cfg.resources.tau, "simulated time");
  res->add_option("--eps", cfg.resources.eps, "simulation accuracy");
  res->add_option("--epsD", cfg.resources.eps_D, "gradient step accuracy");
  res->add_option("--epsNwt", cfg.resources.eps_nwt, "newton step accuracy");
  res->add_option("--delta", cfg.resources.delta, "final accuracy");
  res->add_option("--T", cfg.resources.T, "number of steps");
  std::string res_method = "gradient";
  res->add_option("--method", res_method, "gradient | newton");
  add_common(res, cfg);

  auto* figs = app.add_subcommand("figures", "classical figure-preset trajectories");
  figs->add_option("--name", cfg.preset, "fig1 | fig2 | fig3")->required();
  figs->add_option("--steps", cfg.steps, "override preset step count");
  figs->add_option("--lambda-cut", cfg.lambda_cut, "well-conditioned cutoff");
  add_common(figs, cfg);

  auto* val = app.add_subcommand("validate", "run the invariant suite");
  val->add_option("--problem", cfg.problem_path, "problem file");
  val->add_option("--preset", cfg.preset, "figure preset");
  val->add_option("--random", cfg.random_problems,
                  "random problems in the default battery");
  add_common(val, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "resources") {
    cfg.resources.method =
        res_method == "newton" ? qpd::Method::newton : qpd::Method::gradient;
    if (res->count("--lambda") && !res->count("--lambdaD"))
      cfg.resources.lambda_D = cfg.resources.lambda;
    if (res->count("--lambda") && !res->count("--lambdaH"))
      cfg.resources.lambda_H = cfg.resources.lambda;
  }
  return dispatch(cfg);
}
