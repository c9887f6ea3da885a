#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qpd/operators.hpp"
#include "qpd/rng.hpp"
#include "qpd/tensor_poly.hpp"

namespace qpd {

enum class SimBackend { exact, trotter, sampled_channel };

struct EvolutionConfig {
  double tau = 1.0;
  int trotter_steps = 1;  // m
  SimBackend backend = SimBackend::exact;
  double error_beta = 0.0;  // i.i.d. perturbation magnitude, < 1
  std::uint64_t rng_seed = 42;

  void validate() const;
};

struct ChannelResult {
  DensityMatrix rho_out;
  DensityMatrix exact_rho;
  double trace_distance = 0.0;
  long samples_consumed = 0;  // m * p
  long copies_consumed = 0;   // m * (p-1), the fresh copies alone
  long a_exp_queries = 0;     // A-exponential queries logged by the trotter backend
};

// e^{-iHt} via eigendecomposition; throws on non-Hermitian input.
Eigen::MatrixXcd exact_exponential(const Eigen::MatrixXcd& H, double t);

double operator_norm(const Eigen::MatrixXcd& M);
double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct TrotterResult {
  Eigen::MatrixXcd unitary;
  double deviation = 0.0;  // operator-norm distance to e^{-i M_D t}
  long a_exp_queries = 0;
};

// m-fold product of prod_j Q_j e^{-iA t/m} Q_j^T against the exact e^{-iM_D t}.
TrotterResult trotter_MD(const AlgebraicForm& A, double t, int m);

// Single sample-based channel step: trace out the p-1 copy registers of
// U (copies ⊗ sigma) U^dagger with U = e^{-iM dt} (or a caller-provided U).
DensityMatrix sample_channel_step(const AuxiliaryOperator& M,
                                  const std::vector<DensityMatrix>& copies,
                                  const DensityMatrix& sigma, double dt,
                                  const Eigen::MatrixXcd* step_unitary = nullptr);

enum class EvolveWhich { D, H1 };

// Runs the m-step sample-based evolution with fresh perturbed copies at every
// step, and compares against the exact target built from the unperturbed x.
ChannelResult sample_evolution(const AlgebraicForm& A, const Eigen::VectorXd& x,
                               const EvolutionConfig& cfg, EvolveWhich which);

// Draws v with independent Normal(0, beta^2/N) components, redrawn until
// |v| <= 2 beta, and returns normalize(x + v).
Eigen::VectorXd perturb_state(const Eigen::VectorXd& x, double beta, Rng& rng);

}  // namespace qpd
