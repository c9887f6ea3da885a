#pragma once

#include <Eigen/Dense>

#include "qpd/operators.hpp"

namespace qpd {

enum class PEMode { ideal, circuit };

struct PEConfig {
  PEMode mode = PEMode::ideal;
  int bits = 6;              // circuit mode register width, <= 12
  double epsilon = 0.0;      // eigenvalue grid; 0 means exact (ideal mode)
  double t0 = 1.0;           // base evolution time (circuit mode)
  double lambda_cut = 0.0;   // well-conditioned threshold for inversion

  // 2*pi / (2^bits * t0), the circuit-mode eigenvalue resolution
  double circuit_resolution() const;
  void validate(double lambda_max) const;
};

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXcd eigenvectors; // orthonormal columns
  Eigen::VectorXd binned;        // eigenvalues rounded to the epsilon grid
};

SpectralDecomposition spectral_decomposition(const Eigen::MatrixXcd& H,
                                             double epsilon);

struct PEApplyResult {
  Eigen::VectorXcd vector;     // unnormalized post-selected vector
  double success_prob = 0.0;   // ancilla accept probability per unit input
};

// Post-selected multiplication: sum_j (xi lambda~_j) beta_j |u_j>, with
// lambda~ epsilon-binned (ideal) or b-bit circuit estimates.
PEApplyResult apply_matrix_multiplication(const Eigen::MatrixXcd& H,
                                          const Eigen::VectorXcd& x,
                                          const PEConfig& cfg, double xi);

// Well-conditioned inversion: kept components scaled by xi_H / lambda~
// (xi_H / |lambda~| when saddle_free); components below lambda_cut are
// projected out and their weight is routed to the rejected branch.
PEApplyResult apply_matrix_inversion(const Eigen::MatrixXcd& H,
                                     const Eigen::VectorXcd& y,
                                     const PEConfig& cfg, double xi_H,
                                     bool saddle_free);

struct PECircuitResult {
  Eigen::VectorXd histogram;      // probability over the 2^b outcomes
  Eigen::VectorXd decoded;        // decoded eigenvalue per outcome
  Eigen::VectorXcd joint_state;   // system ⊗ register amplitudes, dim N*2^b
  int modal_outcome = 0;
  double modal_eigenvalue = 0.0;
};

// Textbook b-bit phase estimation on U with input x. Signed eigenvalues come
// from the two's-complement reading of the register, lambda = -2*pi*phase/t0
// mapped into (-pi/t0, pi/t0].
PECircuitResult pe_circuit(const Eigen::MatrixXcd& U, const Eigen::VectorXcd& x,
                           int bits, double t0);

// CSV rows (outcome, probability, decoded eigenvalue)
std::string histogram_csv(const PECircuitResult& r);

// Shared well-conditioned pseudo-inverse (no xi scaling); the classical
// Newton reference uses exactly this so oracle comparisons line up.
Eigen::MatrixXcd wc_pseudo_inverse(const Eigen::MatrixXcd& H, double lambda_cut,
                                   bool saddle_free);

}  // namespace qpd
