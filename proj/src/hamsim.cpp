#include "qpd/hamsim.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace qpd {

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXcd permute_conjugate(const Eigen::MatrixXcd& M,
                                   const std::vector<long>& perm) {
  Eigen::MatrixXcd out(M.rows(), M.cols());
  for (long i = 0; i < M.rows(); ++i)
    for (long j = 0; j < M.cols(); ++j) out(perm[i], perm[j]) = M(i, j);
  return out;
}

}  // namespace

void EvolutionConfig::validate() const {
  if (trotter_steps < 1)
    throw std::invalid_argument("trotter_steps must be >= 1");
  if (!(error_beta >= 0.0 && error_beta < 1.0))
    throw std::invalid_argument("error_beta must lie in [0, 1)");
  if (!std::isfinite(tau)) throw std::invalid_argument("tau must be finite");
}

Eigen::MatrixXcd exact_exponential(const Eigen::MatrixXcd& H, double t) {
  double herm = (H - H.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10)
    throw std::invalid_argument("exact_exponential: input deviates from Hermitian by " +
                                std::to_string(herm));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (long i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Cplx(0.0, -es.eigenvalues()(i) * t));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double operator_norm(const Eigen::MatrixXcd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.adjoint() * M);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd d = a - b;
  d = (d + d.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

TrotterResult trotter_MD(const AlgebraicForm& A, double t, int m) {
  if (m < 1) throw std::invalid_argument("trotter_MD: m must be >= 1");
  if (A.dim() > kMaxTensorDim)
    throw std::invalid_argument("trotter_MD: N^p exceeds the desk-scale cap");
  const int p = A.p;
  const double dt = t / m;
  Eigen::MatrixXcd expA = exact_exponential(A.dense().cast<Cplx>(), dt);
  Eigen::MatrixXcd step = Eigen::MatrixXcd::Identity(A.dim(), A.dim());
  for (int j = 1; j <= p; ++j) {
    auto perm = permutation_swap_register(j, p, A.N);
    step = permute_conjugate(expA, perm) * step;
  }
  TrotterResult r;
  r.unitary = Eigen::MatrixXcd::Identity(A.dim(), A.dim());
  for (int l = 0; l < m; ++l) r.unitary = step * r.unitary;
  r.a_exp_queries = static_cast<long>(m) * p;
  Eigen::MatrixXcd exact = exact_exponential(build_MD(A).data.cast<Cplx>(), t);
  r.deviation = operator_norm(r.unitary - exact);
  return r;
}

DensityMatrix sample_channel_step(const AuxiliaryOperator& M,
                                  const std::vector<DensityMatrix>& copies,
                                  const DensityMatrix& sigma, double dt,
                                  const Eigen::MatrixXcd* step_unitary) {
  const long N = sigma.dim();
  long dim = M.dim;
  int p = 0;
  for (long d = 1; d <= dim; d *= N) ++p;
  p -= 1;
  if (static_cast<long>(std::llround(std::pow(double(N), p))) != dim)
    throw std::invalid_argument("sample_channel_step: operator/state dimension mismatch");
  if (static_cast<int>(copies.size()) != p - 1)
    throw std::invalid_argument("sample_channel_step: expected " +
                                std::to_string(p - 1) + " copies, got " +
                                std::to_string(copies.size()));
  for (const auto& c : copies)
    if (c.dim() != N)
      throw std::invalid_argument("sample_channel_step: copy dimension mismatch");

  Eigen::MatrixXcd U;
  if (step_unitary) {
    U = *step_unitary;
  } else {
    if (operator_norm(M.data.cast<Cplx>()) * std::abs(dt) > 0.5)
      std::cerr << "warning: sample_channel_step with ||M||*dt > 0.5; "
                   "the single-step expansion is not small\n";
    U = exact_exponential(M.data.cast<Cplx>(), dt);
  }

  Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(1, 1);
  for (const auto& c : copies) full = kron(full, c.mat);
  full = kron(full, sigma.mat);
  Eigen::MatrixXcd evolved = U * full * U.adjoint();
  std::vector<long> dims(p, N);
  Eigen::MatrixXcd out = partial_trace(evolved, dims, {p - 1});
  DensityMatrix r;
  r.mat = (out + out.adjoint()) / 2.0;
  return r;
}

ChannelResult sample_evolution(const AlgebraicForm& A, const Eigen::VectorXd& x,
                               const EvolutionConfig& cfg, EvolveWhich which) {
  cfg.validate();
  const int p = A.p, m = cfg.trotter_steps;
  Eigen::VectorXd xn = x / x.norm();
  DensityMatrix rho = DensityMatrix::pure(xn);

  AuxiliaryOperator M = which == EvolveWhich::D ? build_MD(A) : build_MH1(A);
  Eigen::MatrixXcd G = which == EvolveWhich::D
                           ? gradient_operator_D(A, rho)
                           : hessian_part_H1(A, rho);

  ChannelResult res;
  Eigen::MatrixXcd Ut = exact_exponential(G, cfg.tau);
  res.exact_rho.mat = Ut * rho.mat * Ut.adjoint();

  const double dt = cfg.tau / m;
  Eigen::MatrixXcd U;
  if (cfg.backend == SimBackend::trotter && which == EvolveWhich::D) {
    TrotterResult tr = trotter_MD(A, dt, 1);
    U = tr.unitary;
    res.a_exp_queries = static_cast<long>(m) * p;
  } else {
    // exact small-step unitaries; the H1 evolution always uses these
    U = exact_exponential(M.data.cast<Cplx>(), dt);
  }

  Rng perturb_rng = Rng(cfg.rng_seed).substream("perturb");
  DensityMatrix sigma = rho;
  for (int l = 0; l < m; ++l) {
    if (p == 1) {
      sigma = sample_channel_step(M, {}, sigma, dt, &U);
      continue;
    }
    std::vector<DensityMatrix> copies;
    copies.reserve(p - 1);
    for (int k = 0; k < p - 1; ++k)
      copies.push_back(
          DensityMatrix::pure(perturb_state(xn, cfg.error_beta, perturb_rng)));
    sigma = sample_channel_step(M, copies, sigma, dt, &U);
  }
  res.rho_out = sigma;
  res.trace_distance = trace_distance(res.rho_out.mat, res.exact_rho.mat);
  res.copies_consumed = static_cast<long>(m) * (p - 1);
  res.samples_consumed = static_cast<long>(m) * p;
  return res;
}

Eigen::VectorXd perturb_state(const Eigen::VectorXd& x, double beta, Rng& rng) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("perturb_state: beta must lie in [0, 1)");
  if (beta == 0.0) return x;
  const long N = x.size();
  Eigen::VectorXd v(N);
  do {
    for (long i = 0; i < N; ++i)
      v(i) = rng.normal(0.0, beta / std::sqrt(static_cast<double>(N)));
  } while (v.norm() > 2.0 * beta);
  Eigen::VectorXd y = x + v;
  return y / y.norm();
}

}  // namespace qpd
