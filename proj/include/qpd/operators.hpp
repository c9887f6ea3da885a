#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qpd/tensor_poly.hpp"

namespace qpd {

using Cplx = std::complex<double>;

struct DensityMatrix {
  Eigen::MatrixXcd mat;

  long dim() const { return mat.rows(); }
  static DensityMatrix pure(const Eigen::VectorXcd& x);
  static DensityMatrix pure(const Eigen::VectorXd& x);
  // Throws if not Hermitian / unit trace / PSD within tolerances.
  void validate(double herm_tol = 1e-12, double trace_tol = 1e-10,
                double psd_tol = -1e-10) const;
};

enum class AuxKind { MD, MH1 };

struct AuxiliaryOperator {
  AuxKind kind = AuxKind::MD;
  long dim = 0;           // N^p
  Eigen::MatrixXd data;   // dense at desk scale
  long nnz() const;
  long max_row_nnz() const;
};

// Index permutation swapping register j (1-based) with register p of the
// p-fold tensor index; Q_p is the identity.
std::vector<long> permutation_swap_register(int j, int p, int N);

// M_D = sum_j Q_j A Q_j^T
AuxiliaryOperator build_MD(const AlgebraicForm& A);

// Auxiliary operator whose partial trace against p-1 copies of rho gives the
// state-dependent Hessian part: H1 sigma = tr_{1..p-1}{ M_H1 (rho^(p-1) ⊗ sigma) }.
// Built entry-wise from A through the swap-conjugated index identity; carries
// a factor 2 relative to the bare pair sum so that H1 + D reproduces the
// analytic Hessian of the objective. For p = 1 the operator is zero.
AuxiliaryOperator build_MH1(const AlgebraicForm& A);

// Standard partial trace. dims lists the register dimensions (their product
// must equal the matrix dimension); keep lists the 0-based registers to keep,
// in ascending order.
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& M,
                               const std::vector<long>& dims,
                               const std::vector<int>& keep);

// D(rho) = tr_{1..p-1}{ (rho^(p-1) ⊗ I) M_D }, assembled densely.
Eigen::MatrixXcd gradient_operator_D(const AlgebraicForm& A,
                                     const DensityMatrix& rho);

// H(rho) = H1(rho) + D(rho)
Eigen::MatrixXcd hessian_operator(const AlgebraicForm& A,
                                  const DensityMatrix& rho);

// H1(rho) alone, via the dense partial-trace route.
Eigen::MatrixXcd hessian_part_H1(const AlgebraicForm& A,
                                 const DensityMatrix& rho);

// Fast routes contracting the sparse entries of A directly, without the
// N^p-dimensional intermediates. Equal to the dense routes to fp accuracy.
// The vector overloads take p-1 per-register copy states, which the noisy
// channel backend needs (each copy independently perturbed).
Eigen::MatrixXcd gradient_operator_contracted(const AlgebraicForm& A,
                                              const DensityMatrix& rho);
Eigen::MatrixXcd hessian_part_contracted(const AlgebraicForm& A,
                                         const DensityMatrix& rho);
Eigen::MatrixXcd gradient_operator_contracted(
    const AlgebraicForm& A, const std::vector<Eigen::MatrixXcd>& copies);
Eigen::MatrixXcd hessian_part_contracted(
    const AlgebraicForm& A, const std::vector<Eigen::MatrixXcd>& copies);

}  // namespace qpd
