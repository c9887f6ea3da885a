#include "qpd/descent.hpp"

#include <cmath>
#include <iostream>

#include "qpd/hamsim.hpp"
#include "qpd/operators.hpp"
#include "qpd/rng.hpp"

namespace qpd {

namespace {

struct ResolvedStep {
  double eta, xi_D, xi_H, lambda_cut;
  double lambda_D, lambda_H;
  PEConfig pe;
};

void check_unit(const Eigen::VectorXcd& x) {
  if (std::abs(x.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("state must be unit norm");
}

void check_homogeneous(const PolynomialProblem& P) {
  if (!P.homogeneous())
    throw std::invalid_argument(
        "quantum steps are defined for the homogeneous form only; "
        "use the classical reference solvers for inhomogeneous problems");
}

ResolvedStep resolve(const PolynomialProblem& P, const StepConfig& cfg) {
  ResolvedStep r;
  NormBounds nb = norm_bounds(P);
  r.lambda_D = nb.lambda_D;
  r.lambda_H = nb.lambda_H;
  r.eta = cfg.eta;
  if (!(r.eta > 0.0)) throw std::invalid_argument("eta must be positive");
  r.lambda_cut = cfg.pe.lambda_cut > 0.0 ? cfg.pe.lambda_cut
                                         : std::max(nb.lambda_H / 32.0, 1e-12);
  r.pe = cfg.pe;
  r.pe.lambda_cut = r.lambda_cut;
  bool newton = cfg.method != Method::gradient;
  if (cfg.xi_D > 0.0) {
    r.xi_D = cfg.xi_D;
  } else if (newton) {
    // the Newton success bound needs eta <= xi_D xi_H, which the top of the
    // admissible ranges guarantees under the step-size precondition
    r.xi_D = r.lambda_D > 0.0 ? 0.9 / r.lambda_D : 2.0 * r.eta;
  } else {
    r.xi_D = r.lambda_D > 0.0 ? std::min(2.0 * r.eta, 0.9 / r.lambda_D)
                              : 2.0 * r.eta;
  }
  r.xi_H = cfg.xi_H > 0.0 ? cfg.xi_H : 0.9 * r.lambda_cut;
  return r;
}

// D and (for Newton) H per the configured operator backend
struct BuiltOperators {
  Eigen::MatrixXcd D;
  Eigen::MatrixXcd H;
  long samples = 1;
};

BuiltOperators build_operators(const PolynomialProblem& P,
                               const Eigen::VectorXcd& x, const StepConfig& cfg,
                               bool need_hessian) {
  const AlgebraicForm& A = P.hom;
  DensityMatrix rho = DensityMatrix::pure(x);
  BuiltOperators out;
  switch (cfg.backend) {
    case OperatorBackend::analytic:
      out.D = gradient_operator_contracted(A, rho);
      if (need_hessian) out.H = out.D + hessian_part_contracted(A, rho);
      out.samples = A.p;
      break;
    case OperatorBackend::partial_trace:
      out.D = gradient_operator_D(A, rho);
      if (need_hessian) out.H = hessian_operator(A, rho);
      out.samples = A.p;
      break;
    case OperatorBackend::sampled_channel: {
      // mean of the per-step Hamiltonians built from fresh perturbed copies
      Rng rng = Rng(cfg.rng_seed).substream("operator-samples");
      const int m = std::max(1, cfg.channel_steps);
      const int ncopy = A.p - 1;
      Eigen::VectorXd xr = x.real();
      if (x.imag().norm() > 1e-12)
        throw std::invalid_argument(
            "sampled_channel backend expects real states");
      xr /= xr.norm();
      out.D = Eigen::MatrixXcd::Zero(A.N, A.N);
      if (need_hessian) out.H = Eigen::MatrixXcd::Zero(A.N, A.N);
      for (int l = 0; l < m; ++l) {
        std::vector<Eigen::MatrixXcd> copies;
        copies.reserve(ncopy);
        for (int k = 0; k < ncopy; ++k) {
          Eigen::VectorXd xt = perturb_state(xr, cfg.beta, rng);
          copies.push_back(DensityMatrix::pure(xt).mat);
        }
        out.D += gradient_operator_contracted(A, copies);
        if (need_hessian) out.H += hessian_part_contracted(A, copies);
      }
      out.D /= m;
      if (need_hessian) {
        out.H /= m;
        out.H += out.D;
      }
      out.samples = static_cast<long>(m) * std::max(1, ncopy) + 1;
      break;
    }
  }
  out.D = (out.D + out.D.adjoint()) / 2.0;
  if (need_hessian) out.H = (out.H + out.H.adjoint()) / 2.0;
  return out;
}

double objective_of(const PolynomialProblem& P, const Eigen::VectorXcd& x) {
  if (x.imag().norm() > 1e-9) return std::nan("");
  return evaluate(P, x.real());
}

int sample_repetitions(double prob, const StepConfig& cfg) {
  if (!cfg.sample_measurements) return 1;
  Rng rng = Rng(cfg.rng_seed).substream("measurement");
  int k = 1;
  while (!rng.bernoulli(prob) && k < 1000000) ++k;
  return k;
}

}  // namespace

double choose_theta(double eta, double xi) {
  if (!(eta > 0.0)) throw std::invalid_argument("choose_theta: eta must be > 0");
  if (xi < eta)
    throw std::invalid_argument("choose_theta: xi must satisfy xi >= eta");
  return std::atan(eta / xi);
}

StepRecord gradient_step(const Eigen::VectorXcd& x, const PolynomialProblem& P,
                         const StepConfig& cfg) {
  check_homogeneous(P);
  check_unit(x);
  ResolvedStep rs = resolve(P, cfg);
  if (rs.lambda_D > 0.0 && !(rs.eta < 1.0 / (2.0 * rs.lambda_D)))
    throw std::invalid_argument("gradient step size must satisfy eta < 1/(2 Lambda_D)");
  if (!(rs.xi_D >= rs.eta) ||
      (rs.lambda_D > 0.0 && !(rs.xi_D < 1.0 / rs.lambda_D)))
    throw std::invalid_argument("xi_D must satisfy eta <= xi_D < 1/Lambda_D");

  BuiltOperators ops = build_operators(P, x, cfg, false);
  PEApplyResult mult = apply_matrix_multiplication(ops.D, x, rs.pe, rs.xi_D);
  Eigen::VectorXcd dir = mult.vector / rs.xi_D;  // binned D x

  StepRecord rec;
  rec.theta = choose_theta(rs.eta, rs.xi_D);
  Eigen::VectorXcd updated = x - rs.eta * dir;
  double C2 = updated.squaredNorm();
  if (C2 < 1e-24)
    throw NullStateError("gradient step maps the state to the null vector");
  rec.C = std::sqrt(C2);
  rec.state_after = updated / rec.C;
  rec.success_prob = C2 / (2.0 * (1.0 + rs.eta * rs.eta / (rs.xi_D * rs.xi_D)));
  rec.objective = objective_of(P, rec.state_after);
  rec.epsilon_accum = rs.eta * cfg.epsilon_step;
  rec.repetitions = sample_repetitions(rec.success_prob, cfg);
  rec.samples_consumed = ops.samples * rec.repetitions;
  return rec;
}

StepRecord newton_step(const Eigen::VectorXcd& x, const PolynomialProblem& P,
                       const StepConfig& cfg) {
  check_homogeneous(P);
  check_unit(x);
  ResolvedStep rs = resolve(P, cfg);
  double lambda_Hinv = 1.0 / rs.lambda_cut;
  double cap = std::max({rs.lambda_D, lambda_Hinv, rs.lambda_D * lambda_Hinv});
  if (cap > 0.0 && !(rs.eta < 1.0 / (2.0 * cap)))
    throw std::invalid_argument(
        "newton step size must satisfy eta < 1/(2 max{Lambda_D, Lambda_Hinv, "
        "Lambda_D Lambda_Hinv})");
  if (!(rs.xi_D >= rs.eta) ||
      (rs.lambda_D > 0.0 && !(rs.xi_D < 1.0 / rs.lambda_D)))
    throw std::invalid_argument("xi_D must satisfy eta <= xi_D < 1/Lambda_D");
  if (!(rs.xi_H >= rs.eta) || !(rs.xi_H < rs.lambda_cut))
    throw std::invalid_argument("xi_H must satisfy eta <= xi_H < lambda_cut");
  if (!(rs.xi_D * rs.xi_H >= rs.eta))
    throw std::invalid_argument(
        "the newton rotation needs eta <= xi_D * xi_H; raise the xi values");

  BuiltOperators ops = build_operators(P, x, cfg, true);
  PEApplyResult mult = apply_matrix_multiplication(ops.D, x, rs.pe, rs.xi_D);
  bool saddle_free = cfg.method == Method::newton_saddle_free;
  PEApplyResult inv =
      apply_matrix_inversion(ops.H, mult.vector, rs.pe, rs.xi_H, saddle_free);
  Eigen::VectorXcd dir = inv.vector / (rs.xi_D * rs.xi_H);

  StepRecord rec;
  rec.gradient_filtered =
      mult.vector.norm() > 1e-12 && inv.vector.norm() < 1e-14;
  double xiprod = rs.xi_D * rs.xi_H;
  rec.theta = choose_theta(rs.eta, xiprod);
  Eigen::VectorXcd updated = x - rs.eta * dir;
  double C2 = updated.squaredNorm();
  if (C2 < 1e-24)
    throw NullStateError("newton step maps the state to the null vector");
  rec.C = std::sqrt(C2);
  rec.state_after = updated / rec.C;
  rec.success_prob = C2 / (2.0 * (1.0 + rs.eta * rs.eta / (xiprod * xiprod)));
  rec.objective = objective_of(P, rec.state_after);
  rec.epsilon_accum = rs.eta * cfg.epsilon_step;
  rec.repetitions = sample_repetitions(rec.success_prob, cfg);
  rec.samples_consumed = ops.samples * rec.repetitions;
  return rec;
}

DescentTrajectory run_descent(const PolynomialProblem& P,
                              const Eigen::VectorXcd& x0,
                              const std::vector<StepConfig>& schedule) {
  DescentTrajectory traj;
  traj.x0 = x0 / x0.norm();

  double max_eta = 0.0;
  for (const auto& cfg : schedule) max_eta = std::max(max_eta, cfg.eta);
  double budget = schedule.size() * max_eta;
  if (budget > 3.0) {
    traj.warnings.push_back(
        "T * max(eta) = " + std::to_string(budget) +
        "; the bounded-exploration assumption is strained");
    std::cerr << "warning: " << traj.warnings.back() << "\n";
  }

  Eigen::VectorXcd x = traj.x0;
  double eps_accum = 0.0;
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    StepConfig cfg = schedule[t];
    cfg.rng_seed = Rng(cfg.rng_seed).substream("step", t).seed();
    StepRecord rec = cfg.method == Method::gradient
                         ? gradient_step(x, P, cfg)
                         : newton_step(x, P, cfg);
    eps_accum += rec.epsilon_accum;
    rec.epsilon_accum = eps_accum;
    x = rec.state_after;
    traj.total_samples *= std::max<long>(1, rec.samples_consumed);
    traj.steps.push_back(std::move(rec));
  }
  return traj;
}

ResourceEstimate estimate_resources(const ResourceParams& params) {
  auto pw = [](double b, double e) { return std::pow(b, e); };
  const double p = params.p, sA = params.s_A;
  const double lam = params.lambda > 0.0
                         ? params.lambda
                         : std::max(params.lambda_D, params.lambda_H);
  ResourceEstimate r;
  r.copies_sim_D = pw(p, 5) * pw(params.lambda_D, 2) * pw(params.tau, 2) /
                   pw(params.eps, 2);
  r.queries_sim_D = pw(p, 4) * pw(params.lambda_D, 3) * pw(params.tau, 2) *
                    sA / pw(params.eps, 2);
  r.gates_sim_D = pw(p, 5) * pw(params.lambda_D, 3) * pw(params.tau, 2) * sA /
                  pw(params.eps, 2);
  if (params.method == Method::gradient) {
    r.copies_step = pw(p, 5) * pw(params.lambda_D, 2) / pw(params.eps_D, 4);
    r.queries_step = pw(p, 4) * pw(params.lambda_D, 3) * sA / pw(params.eps_D, 4);
    r.gates_step = pw(p, 5) * pw(params.lambda_D, 3) * sA / pw(params.eps_D, 4);
    r.copies_multi_step =
        pw(pw(p, 5) * pw(lam, 2) / pw(params.delta, 4), params.T);
  } else {
    r.copies_step = pw(p, 9) * pw(lam, 2) / pw(params.eps_nwt, 4);
    r.queries_step = pw(p, 8) * pw(lam, 3) * sA / pw(params.eps_nwt, 4);
    r.gates_step = pw(p, 10) * pw(lam, 3) * sA / pw(params.eps_nwt, 4);
    r.copies_multi_step =
        pw(pw(p, 9) * pw(lam, 2) / pw(params.delta, 4), params.T);
  }
  return r;
}

}  // namespace qpd
