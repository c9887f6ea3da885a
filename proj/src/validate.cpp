#include "qpd/validate.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "qpd/classical_ref.hpp"
#include "qpd/descent.hpp"
#include "qpd/hamsim.hpp"
#include "qpd/operators.hpp"
#include "qpd/phase_estimation.hpp"
#include "qpd/random_problems.hpp"

namespace qpd {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Eigen::VectorXd fd_gradient(const PolynomialProblem& P, const Eigen::VectorXd& x,
                            double h) {
  const int N = P.hom.N;
  Eigen::VectorXd g(N);
  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
    e(i) = h;
    g(i) = (evaluate(P, x + e) - evaluate(P, x - e)) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const PolynomialProblem& P, const Eigen::VectorXd& x,
                           double h) {
  const int N = P.hom.N;
  Eigen::MatrixXd H(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(N), ej = Eigen::VectorXd::Zero(N);
      ei(i) = h;
      ej(j) = h;
      H(i, j) = (evaluate(P, x + ei + ej) - evaluate(P, x + ei - ej) -
                 evaluate(P, x - ei + ej) + evaluate(P, x - ei - ej)) /
                (4.0 * h * h);
    }
  }
  return H;
}

struct Suite {
  std::vector<CheckResult> results;
  void add(const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  }
};

StepConfig base_step_config(const NormBounds& nb, double eta,
                            std::uint64_t seed) {
  StepConfig cfg;
  cfg.eta = eta;
  cfg.pe.mode = PEMode::ideal;
  cfg.pe.epsilon = 0.0;
  cfg.rng_seed = seed;
  (void)nb;
  return cfg;
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

std::vector<CheckResult> validate_problem(const PolynomialProblem& P,
                                          std::uint64_t seed) {
  Suite s;
  Rng root(seed);
  const int N = P.hom.N, p = P.hom.p;
  NormBounds nb = norm_bounds(P);
  PolynomialProblem Ph = P.homogeneous_part();
  const bool zero_form = P.hom.entries.empty();

  // --- classical gradient/Hessian against central finite differences
  {
    Rng rng = root.substream("fd");
    double worst_g = 0.0, worst_h = 0.0, worst_sym = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x = random_unit_vector(rng, N);
      Eigen::VectorXd g = gradient_classical(P, x);
      Eigen::VectorXd gfd = fd_gradient(P, x, 1e-5);
      double scale = std::max(g.norm(), 1e-3);
      worst_g = std::max(worst_g, (g - gfd).norm() / scale);
      if (trial < 10) {
        Eigen::MatrixXd H = hessian_classical(P, x);
        Eigen::MatrixXd Hfd = fd_hessian(P, x, 1e-4);
        double hs = std::max(H.norm(), 1e-3);
        worst_h = std::max(worst_h, (H - Hfd).norm() / hs);
        worst_sym = std::max(worst_sym, (H - H.transpose()).norm());
      }
    }
    s.add("gradient_fd_consistency", worst_g <= 1e-6, "rel err " + fmt(worst_g));
    s.add("hessian_fd_consistency", worst_h <= 1e-4, "rel err " + fmt(worst_h));
    s.add("hessian_symmetry", worst_sym <= 1e-10, "asym " + fmt(worst_sym));
  }

  // --- Euler identity on the homogeneous part
  {
    Rng rng = root.substream("euler");
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd x = random_unit_vector(rng, N);
      double f = evaluate(Ph, x);
      double lhs = x.dot(gradient_classical(Ph, x));
      worst = std::max(worst, std::abs(lhs - 2.0 * p * f) /
                                  std::max(1.0, std::abs(f)));
    }
    s.add("euler_identity", worst <= 1e-10, "rel err " + fmt(worst));
  }

  // --- norm bounds over random unit vectors. The Hessian bound uses the
  // provable constant (2p^2 - p) Lambda_A; p^2 Lambda_A holds only for the
  // halved cross term.
  {
    Rng rng = root.substream("norm-bounds");
    double worst_g = 0.0, worst_h = 0.0;
    double hbound = (2.0 * p * p - p) * nb.lambda_A_raw;
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd x = random_unit_vector(rng, N);
      worst_g = std::max(worst_g, gradient_classical(Ph, x).norm());
      worst_h = std::max(worst_h, operator_norm(hessian_classical(Ph, x).cast<Cplx>()));
    }
    s.add("norm_bound_gradient", worst_g <= nb.lambda_D + 1e-9,
          "max " + fmt(worst_g) + " vs " + fmt(nb.lambda_D));
    s.add("norm_bound_hessian", worst_h <= hbound + 1e-9,
          "max " + fmt(worst_h) + " vs (2p^2-p) Lambda_A = " + fmt(hbound));
  }

  // --- operator identities (homogeneous part)
  {
    Rng rng = root.substream("operators");
    double worst_d = 0.0, worst_h = 0.0, worst_routes = 0.0, worst_herm = 0.0;
    double worst_basis = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd x = random_unit_vector(rng, N);
      DensityMatrix rho = DensityMatrix::pure(x);
      Eigen::MatrixXcd D = gradient_operator_D(P.hom, rho);
      worst_d = std::max(
          worst_d,
          ((D * x.cast<Cplx>()).real() - gradient_classical(Ph, x)).norm());
      Eigen::MatrixXcd H = hessian_operator(P.hom, rho);
      worst_h = std::max(
          worst_h, (H.real() - hessian_classical(Ph, x)).cwiseAbs().maxCoeff());
      worst_herm = std::max(worst_herm, (H - H.adjoint()).cwiseAbs().maxCoeff());
      worst_routes = std::max(
          worst_routes,
          (D - gradient_operator_contracted(P.hom, rho)).cwiseAbs().maxCoeff());
      if (p >= 2) {
        worst_routes = std::max(worst_routes,
                                (hessian_part_H1(P.hom, rho) -
                                 hessian_part_contracted(P.hom, rho))
                                    .cwiseAbs()
                                    .maxCoeff());
        // Eq.-20 route: reconstruct columns of H1 by feeding basis sigmas
        AuxiliaryOperator MH1 = build_MH1(P.hom);
        Eigen::MatrixXcd H1 = hessian_part_H1(P.hom, rho);
        Eigen::MatrixXcd copies = Eigen::MatrixXcd::Identity(1, 1);
        for (int k = 0; k < p - 1; ++k) {
          Eigen::MatrixXcd next(copies.rows() * N, copies.cols() * N);
          for (long i = 0; i < copies.rows(); ++i)
            for (long j = 0; j < copies.cols(); ++j)
              next.block(i * N, j * N, N, N) = copies(i, j) * rho.mat;
          copies = next;
        }
        for (int a = 0; a < N; ++a) {
          Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(N, N);
          sigma(a, a) = 1.0;
          Eigen::MatrixXcd full(copies.rows() * N, copies.cols() * N);
          for (long i = 0; i < copies.rows(); ++i)
            for (long j = 0; j < copies.cols(); ++j)
              full.block(i * N, j * N, N, N) = copies(i, j) * sigma;
          std::vector<long> dims(p, N);
          Eigen::MatrixXcd prod =
              partial_trace(MH1.data.cast<Cplx>() * full, dims, {p - 1});
          worst_basis = std::max(
              worst_basis, (prod.col(a) - H1.col(a)).cwiseAbs().maxCoeff());
        }
      }
    }
    s.add("partial_trace_gradient_identity", worst_d <= 1e-10, fmt(worst_d));
    s.add("hessian_operator_identity", worst_h <= 1e-8, fmt(worst_h));
    s.add("hessian_operator_hermitian", worst_herm <= 1e-10, fmt(worst_herm));
    s.add("operator_route_consistency", worst_routes <= 1e-10, fmt(worst_routes));
    if (p >= 2)
      s.add("hessian_sigma_basis_route", worst_basis <= 1e-10, fmt(worst_basis));
  }

  // --- auxiliary-operator structure
  {
    AuxiliaryOperator MD = build_MD(P.hom);
    AuxiliaryOperator MH1 = build_MH1(P.hom);
    double herm = (MD.data - MD.data.transpose()).cwiseAbs().maxCoeff() +
                  (MH1.data - MH1.data.transpose()).cwiseAbs().maxCoeff();
    bool sp_d = MD.max_row_nnz() <= static_cast<long>(p) * nb.s_A;
    bool sp_h =
        MH1.max_row_nnz() <= static_cast<long>(p) * p * nb.s_A;
    s.add("auxiliary_hermitian", herm <= 1e-10, fmt(herm));
    s.add("MD_sparsity", sp_d,
          std::to_string(MD.max_row_nnz()) + " <= p s_A = " +
              std::to_string(p * nb.s_A));
    s.add("MH1_sparsity", sp_h,
          std::to_string(MH1.max_row_nnz()) + " <= p^2 s_A = " +
              std::to_string(p * p * nb.s_A));
  }

  // --- mixed-state operator norm bounds
  {
    Rng rng = root.substream("mixed");
    double worst_d = 0.0, worst_h = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      DensityMatrix rho = random_density(rng, N);
      worst_d = std::max(worst_d, operator_norm(gradient_operator_D(P.hom, rho)));
      worst_h = std::max(worst_h, operator_norm(hessian_operator(P.hom, rho)));
    }
    s.add("operator_norm_D", worst_d <= p * nb.lambda_A_raw + 1e-9,
          fmt(worst_d) + " vs p Lambda_A = " + fmt(p * nb.lambda_A_raw));
    s.add("operator_norm_H",
          worst_h <= (2.0 * p * p - p) * nb.lambda_A_raw + 1e-9,
          fmt(worst_h) + " vs (2p^2-p) Lambda_A");
  }

  // --- time evolution
  {
    Rng rng = root.substream("hamsim");
    Eigen::VectorXd x = random_unit_vector(rng, N);
    DensityMatrix rho = DensityMatrix::pure(x);
    Eigen::MatrixXcd D = gradient_operator_D(P.hom, rho);
    Eigen::MatrixXcd U = exact_exponential(D, 0.7);
    double unit = (U.adjoint() * U -
                   Eigen::MatrixXcd::Identity(N, N)).cwiseAbs().maxCoeff();
    s.add("exact_exponential_unitary", unit <= 1e-9, fmt(unit));

    if (!zero_form) {
      EvolutionConfig ec;
      ec.tau = 0.4;
      ec.trotter_steps = 16;
      ec.error_beta = 0.1;
      ec.rng_seed = root.substream("channel").seed();
      ChannelResult cr = sample_evolution(P.hom, x, ec, EvolveWhich::D);
      bool dm_ok = true;
      std::string why;
      try {
        cr.rho_out.validate(1e-9, 1e-9, -1e-9);
      } catch (const std::exception& e) {
        dm_ok = false;
        why = e.what();
      }
      bool td_ok = cr.trace_distance >= 0.0 && cr.trace_distance <= 1.0;
      bool count_ok = cr.samples_consumed == 16L * p &&
                      cr.copies_consumed == 16L * (p - 1);
      s.add("channel_density_matrix", dm_ok && td_ok, why.empty() ? "ok" : why);
      s.add("channel_sample_accounting", count_ok,
            std::to_string(cr.samples_consumed) + " = m p");

      if (p >= 2) {
        TrotterResult t8 = trotter_MD(P.hom, 1.0, 8);
        TrotterResult t16 = trotter_MD(P.hom, 1.0, 16);
        bool ok;
        std::string detail;
        if (t8.deviation < 1e-12) {
          ok = t16.deviation < 1e-12;  // commuting terms, no Trotter error
          detail = "commuting terms";
        } else {
          double ratio = t8.deviation / t16.deviation;
          ok = ratio >= 1.3 && ratio <= 2.7;
          detail = "ratio " + fmt(ratio);
        }
        s.add("trotter_first_order", ok, detail);
      } else {
        TrotterResult t1 = trotter_MD(P.hom, 1.0, 1);
        s.add("trotter_exact_p1", t1.deviation <= 1e-10, fmt(t1.deviation));
      }
    }

    Rng prng = root.substream("perturb-check");
    Eigen::VectorXd same = perturb_state(x, 0.0, prng);
    bool id_ok = (same - x).norm() == 0.0;
    Eigen::VectorXd pert = perturb_state(x, 0.1, prng);
    s.add("perturb_identity_and_norm",
          id_ok && std::abs(pert.norm() - 1.0) <= 1e-12,
          "beta=0 identity, |x~| - 1 = " + fmt(pert.norm() - 1.0));
  }

  // --- phase estimation round trips on D(x)
  if (!zero_form) {
    Rng rng = root.substream("pe");
    Eigen::VectorXd x = random_unit_vector(rng, N);
    Eigen::MatrixXcd D = gradient_operator_D(P.hom, DensityMatrix::pure(x));
    PEConfig pc;
    pc.mode = PEMode::ideal;
    pc.epsilon = 0.0;
    pc.lambda_cut = std::max(nb.lambda_H / 32.0, 1e-12);
    double lam_max = operator_norm(D);
    double xi = lam_max > 0.0 ? 0.9 / lam_max : 1.0;
    PEApplyResult mult = apply_matrix_multiplication(D, x.cast<Cplx>(), pc, xi);
    double mult_err =
        (mult.vector / xi - D * x.cast<Cplx>()).norm();
    s.add("pe_multiplication_exact", mult_err <= 1e-10, fmt(mult_err));
    bool prob_ok = mult.success_prob >= 0.0 && mult.success_prob <= 1.0;
    s.add("pe_success_prob_range", prob_ok, fmt(mult.success_prob));

    // inversion then multiplication reproduces the kept-subspace projection
    Eigen::MatrixXcd H =
        hessian_operator(P.hom, DensityMatrix::pure(x));
    double xi_H = 0.9 * pc.lambda_cut;
    PEApplyResult inv =
        apply_matrix_inversion(H, x.cast<Cplx>(), pc, xi_H, false);
    double lam_max_h = operator_norm(H);
    double xi2 = lam_max_h > 0.0 ? 0.9 / lam_max_h : 1.0;
    PEApplyResult back =
        apply_matrix_multiplication(H, inv.vector, pc, xi2);
    SpectralDecomposition sd = spectral_decomposition(H, 0.0);
    Eigen::VectorXcd proj = Eigen::VectorXcd::Zero(N);
    for (int j = 0; j < N; ++j)
      if (std::abs(sd.eigenvalues(j)) >= pc.lambda_cut)
        proj += sd.eigenvectors.col(j) *
                (sd.eigenvectors.col(j).adjoint() * x.cast<Cplx>());
    double round_err = (back.vector / (xi2 * xi_H) - proj).norm();
    s.add("pe_inversion_roundtrip", round_err <= 1e-8, fmt(round_err));

    // circuit-mode binning against the ideal grid; stay a grid spacing
    // below the +-pi wrap boundary
    int bits = 8;
    double t0 = lam_max > 0.0
                    ? M_PI * (1.0 - std::pow(2.0, 1 - bits)) / lam_max
                    : 1.0;
    Eigen::MatrixXcd U = exact_exponential(D, t0);
    double reso = 2.0 * M_PI / ((1 << bits) * t0);
    double worst_dev = 0.0;
    SpectralDecomposition sdd = spectral_decomposition(D, 0.0);
    for (int j = 0; j < N; ++j) {
      PECircuitResult pr =
          pe_circuit(U, sdd.eigenvectors.col(j), bits, t0);
      worst_dev = std::max(
          worst_dev, std::abs(pr.modal_eigenvalue - sdd.eigenvalues(j)));
    }
    s.add("pe_circuit_resolution", worst_dev <= reso,
          fmt(worst_dev) + " vs grid " + fmt(reso));
  }

  // --- quantum/classical step equivalence and success bounds
  if (!zero_form && nb.lambda_D > 0.0) {
    Rng rng = root.substream("steps");
    double cut = std::max(nb.lambda_H / 32.0, 1e-12);
    double eta_g = 0.45 / (2.0 * nb.lambda_D);
    double lam_hinv = 1.0 / cut;
    double eta_n =
        0.45 / (2.0 * std::max({nb.lambda_D, lam_hinv, nb.lambda_D * lam_hinv}));
    double worst_fid_g = 0.0, worst_fid_n = 0.0;
    double min_prob = 1.0;
    double worst_c = 0.0;
    bool bounds_hold = true;
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd x = random_unit_vector(rng, N);
      Eigen::VectorXcd xc = x.cast<Cplx>();
      StepConfig cfg = base_step_config(nb, eta_g, root.substream("sg", trial).seed());
      StepRecord rec = gradient_step(xc, Ph, cfg);
      auto cl = projected_gradient_descent(Ph, x, {eta_g}, 1);
      double fid = std::norm((rec.state_after.adjoint() *
                              cl.points[1].cast<Cplx>().eval())(0));
      worst_fid_g = std::max(worst_fid_g, 1.0 - fid);
      min_prob = std::min(min_prob, rec.success_prob);
      if (rec.success_prob <= 1.0 / 16.0) bounds_hold = false;

      // closed-form normalization identity with the (un-binned) D
      Eigen::MatrixXcd D =
          gradient_operator_contracted(Ph.hom, DensityMatrix::pure(x));
      Eigen::VectorXcd Dx = D * xc;
      double c2_form = 1.0 - 2.0 * eta_g * (xc.adjoint() * Dx)(0).real() +
                       eta_g * eta_g * Dx.squaredNorm();
      worst_c = std::max(worst_c, std::abs(rec.C * rec.C - c2_form));

      StepConfig ncfg = cfg;
      ncfg.eta = eta_n;
      ncfg.method = Method::newton;
      ncfg.pe.lambda_cut = cut;
      StepRecord nrec = newton_step(xc, Ph, ncfg);
      auto ncl = projected_newton(Ph, x, {eta_n}, 1, false, cut);
      double nfid = std::norm((nrec.state_after.adjoint() *
                               ncl.points[1].cast<Cplx>().eval())(0));
      worst_fid_n = std::max(worst_fid_n, 1.0 - nfid);
      min_prob = std::min(min_prob, nrec.success_prob);
      if (nrec.success_prob <= 1.0 / 16.0) bounds_hold = false;

      Eigen::MatrixXcd H =
          hessian_operator(Ph.hom, DensityMatrix::pure(x));
      Eigen::VectorXcd ndir = wc_pseudo_inverse(H, cut, false) * Dx;
      double c2_newton = 1.0 - 2.0 * eta_n * (xc.adjoint() * ndir)(0).real() +
                         eta_n * eta_n * ndir.squaredNorm();
      worst_c = std::max(worst_c, std::abs(nrec.C * nrec.C - c2_newton));
    }
    s.add("oracle_equivalence_gradient", worst_fid_g <= 1e-9,
          "1 - fidelity " + fmt(worst_fid_g));
    s.add("oracle_equivalence_newton", worst_fid_n <= 1e-9,
          "1 - fidelity " + fmt(worst_fid_n));
    s.add("success_probability_bounds", bounds_hold,
          "min P " + fmt(min_prob) + " vs 1/16");
    s.add("normalization_identity", worst_c <= 1e-10, fmt(worst_c));

    // exact error accumulation over equal steps
    StepConfig cfg = base_step_config(nb, eta_g, seed);
    cfg.epsilon_step = 0.01;
    std::vector<StepConfig> schedule(5, cfg);
    Eigen::VectorXd x = random_unit_vector(rng, N);
    DescentTrajectory traj = run_descent(Ph, x.cast<Cplx>(), schedule);
    double want = 5.0 * (eta_g * 0.01);
    double got = traj.steps.back().epsilon_accum;
    s.add("error_accumulation_exact", std::abs(got - want) <= 1e-15,
          fmt(got) + " vs " + fmt(want));
  }

  // --- classical trajectories stay on the sphere
  {
    Rng rng = root.substream("classical");
    Eigen::VectorXd x = random_unit_vector(rng, N);
    double eta = nb.lambda_D > 0.0 ? 0.45 / (2.0 * nb.lambda_D) : 0.05;
    auto traj = projected_gradient_descent(P, x, {eta}, 25);
    double worst = 0.0;
    for (const auto& pt : traj.points)
      worst = std::max(worst, std::abs(pt.norm() - 1.0));
    s.add("classical_unit_norm", worst <= 1e-12, fmt(worst));
  }

  return s.results;
}

}  // namespace qpd
