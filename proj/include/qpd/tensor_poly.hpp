#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpd {

// Desk-scale cap on the tensor-space dimension N^p. Larger inputs are
// rejected up front: every operator build below assembles dense N^p x N^p
// matrices.
inline constexpr long kMaxTensorDim = 256;

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct SparseEntry {
  long row = 0;
  long col = 0;
  double value = 0.0;
};

// Even homogeneous polynomial of degree 2p over R^N, N = 2^n, stored as the
// algebraic form x^T ⊗...⊗ x^T A x ⊗...⊗ x with A a sparse symmetric
// N^p x N^p matrix. Entries are kept in canonical (row, col) order after
// symmetrization over the matrix transpose and every per-register transpose;
// that larger symmetry group leaves the polynomial untouched but is what the
// operator constructions require (the formal decomposition of A into
// products of symmetric factors).
struct AlgebraicForm {
  int p = 1;
  int n = 1;
  int N = 2;
  std::vector<SparseEntry> entries;
  double lambda_A = 1.0;       // clamped bound, >= 1 and >= spectral norm
  double lambda_A_raw = 0.0;   // exact spectral norm of the assembled A

  long dim() const {
    long d = 1;
    for (int i = 0; i < p; ++i) d *= N;
    return d;
  }
  Eigen::MatrixXd dense() const;
};

// One inhomogeneous term (c_j^T x) * prod_{i<j} (x^T B_ij x).
struct InhomTerm {
  int level = 1;                     // j; monomial degree is 2j-1
  Eigen::VectorXd c;                 // dimension N
  std::vector<Eigen::MatrixXd> B;    // j-1 symmetric N x N matrices
};

struct PolynomialProblem {
  AlgebraicForm hom;
  std::vector<InhomTerm> inhom;

  bool homogeneous() const { return inhom.empty(); }
  PolynomialProblem homogeneous_part() const { return {hom, {}}; }
};

// Parses the line-oriented problem file format:
//   p=<int> n=<int> [lambda_A=<float>]
//   hom <row> <col> <value>
//   inhom j=<int>
//   c <i> <value>
//   B <k> <row> <col> <value>
// '#' starts a comment. Duplicate entries are summed before symmetrization.
PolynomialProblem load_problem(const std::string& text);
PolynomialProblem load_problem_file(const std::string& path);

double evaluate(const PolynomialProblem& P, const Eigen::VectorXd& x);
Eigen::VectorXd gradient_classical(const PolynomialProblem& P,
                                   const Eigen::VectorXd& x);
Eigen::MatrixXd hessian_classical(const PolynomialProblem& P,
                                  const Eigen::VectorXd& x);

struct NormBounds {
  double lambda_A_raw = 0.0;  // exact ||A||
  double lambda_A = 1.0;      // clamped to >= 1 (Problem-1 convention)
  double lambda_D = 0.0;      // p * lambda_A_raw
  double lambda_H = 0.0;      // p^2 * lambda_A_raw
  long s_A = 0;               // max nonzeros per row/column
};

NormBounds norm_bounds(const PolynomialProblem& P);

}  // namespace qpd
