#include "qpd/operators.hpp"

#include <algorithm>
#include <stdexcept>

namespace qpd {

namespace {

void index_digits(long idx, int p, int N, long* d) {
  for (int r = p - 1; r >= 0; --r) {
    d[r] = idx % N;
    idx /= N;
  }
}

long digits_index(const long* d, int p, int N) {
  long idx = 0;
  for (int r = 0; r < p; ++r) idx = idx * N + d[r];
  return idx;
}

void check_cap(const AlgebraicForm& A) {
  if (A.dim() > kMaxTensorDim)
    throw std::invalid_argument("N^p exceeds the desk-scale cap of " +
                                std::to_string(kMaxTensorDim));
}

Eigen::MatrixXcd copies_kron(const std::vector<const Eigen::MatrixXcd*>& ms) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (const auto* m : ms) {
    Eigen::MatrixXcd next(out.rows() * m->rows(), out.cols() * m->cols());
    for (long i = 0; i < out.rows(); ++i)
      for (long j = 0; j < out.cols(); ++j)
        next.block(i * m->rows(), j * m->cols(), m->rows(), m->cols()) =
            out(i, j) * (*m);
    out = std::move(next);
  }
  return out;
}

// rho^(p-1) ⊗ I_N as a dense matrix on N^p
Eigen::MatrixXcd copies_times_identity(const DensityMatrix& rho, int p, int N) {
  std::vector<const Eigen::MatrixXcd*> ms(p - 1, &rho.mat);
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(N, N);
  ms.push_back(&id);
  return copies_kron(ms);
}

}  // namespace

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& x) {
  DensityMatrix r;
  r.mat = x * x.adjoint();
  return r;
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXd& x) {
  return pure(Eigen::VectorXcd(x.cast<Cplx>()));
}

void DensityMatrix::validate(double herm_tol, double trace_tol,
                             double psd_tol) const {
  if (mat.rows() != mat.cols())
    throw std::invalid_argument("density matrix is not square");
  double herm = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol)
    throw std::invalid_argument("density matrix not Hermitian, deviation " +
                                std::to_string(herm));
  double tr = std::abs(mat.trace() - Cplx(1.0, 0.0));
  if (tr > trace_tol)
    throw std::invalid_argument("density matrix trace deviates from 1 by " +
                                std::to_string(tr));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat);
  if (es.eigenvalues().minCoeff() < psd_tol)
    throw std::invalid_argument("density matrix has eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
}

long AuxiliaryOperator::nnz() const {
  long c = 0;
  for (long i = 0; i < data.rows(); ++i)
    for (long j = 0; j < data.cols(); ++j)
      if (data(i, j) != 0.0) ++c;
  return c;
}

long AuxiliaryOperator::max_row_nnz() const {
  long best = 0;
  for (long i = 0; i < data.rows(); ++i) {
    long c = 0;
    for (long j = 0; j < data.cols(); ++j)
      if (data(i, j) != 0.0) ++c;
    best = std::max(best, c);
  }
  return best;
}

std::vector<long> permutation_swap_register(int j, int p, int N) {
  if (j < 1 || j > p)
    throw std::invalid_argument("register index j=" + std::to_string(j) +
                                " out of range [1, " + std::to_string(p) + "]");
  long dim = 1;
  for (int i = 0; i < p; ++i) dim *= N;
  std::vector<long> perm(dim);
  long d[16];
  for (long idx = 0; idx < dim; ++idx) {
    index_digits(idx, p, N, d);
    std::swap(d[j - 1], d[p - 1]);
    perm[idx] = digits_index(d, p, N);
  }
  return perm;
}

AuxiliaryOperator build_MD(const AlgebraicForm& A) {
  check_cap(A);
  const int p = A.p, N = A.N;
  const long dim = A.dim();
  AuxiliaryOperator op;
  op.kind = AuxKind::MD;
  op.dim = dim;
  op.data = Eigen::MatrixXd::Zero(dim, dim);
  long rd[16], cd[16];
  for (const auto& e : A.entries) {
    for (int j = 0; j < p; ++j) {
      index_digits(e.row, p, N, rd);
      index_digits(e.col, p, N, cd);
      std::swap(rd[j], rd[p - 1]);
      std::swap(cd[j], cd[p - 1]);
      op.data(digits_index(rd, p, N), digits_index(cd, p, N)) += e.value;
    }
  }
  return op;
}

AuxiliaryOperator build_MH1(const AlgebraicForm& A) {
  check_cap(A);
  const int p = A.p, N = A.N;
  const long dim = A.dim();
  AuxiliaryOperator op;
  op.kind = AuxKind::MH1;
  op.dim = dim;
  op.data = Eigen::MatrixXd::Zero(dim, dim);
  if (p < 2) return op;  // empty j != k sum

  long ad[16], bd[16], rd[16], cd[16];
  int g[16];
  for (const auto& e : A.entries) {
    index_digits(e.row, p, N, ad);
    index_digits(e.col, p, N, bd);
    for (int j = 0; j < p; ++j) {
      for (int k = 0; k < p; ++k) {
        if (j == k) continue;
        int m = 0;
        for (int r = 0; r < p; ++r)
          if (r != j && r != k) g[m++] = r;
        for (int s = 0; s < p - 2; ++s) {
          rd[s] = ad[g[s]];
          cd[s] = bd[g[s]];
        }
        // the swap-conjugated pair: rows read slots (j,k), columns (k,j)
        rd[p - 2] = ad[j];
        rd[p - 1] = ad[k];
        cd[p - 2] = bd[k];
        cd[p - 1] = bd[j];
        // factor 2: the ordered pair sum carries half the analytic Hessian's
        // cross term
        op.data(digits_index(rd, p, N), digits_index(cd, p, N)) +=
            2.0 * e.value;
      }
    }
  }
  return op;
}

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& M,
                               const std::vector<long>& dims,
                               const std::vector<int>& keep) {
  long total = 1;
  for (long d : dims) total *= d;
  if (total != M.rows() || M.rows() != M.cols())
    throw std::invalid_argument("partial_trace: dims do not match matrix");
  const int R = static_cast<int>(dims.size());
  std::vector<bool> kept(R, false);
  for (int k : keep) {
    if (k < 0 || k >= R)
      throw std::invalid_argument("partial_trace: register index out of range");
    kept[k] = true;
  }
  std::vector<int> keep_regs, trace_regs;
  for (int r = 0; r < R; ++r) (kept[r] ? keep_regs : trace_regs).push_back(r);

  long dk = 1, dt = 1;
  for (int r : keep_regs) dk *= dims[r];
  for (int r : trace_regs) dt *= dims[r];

  // strides of each register in the full index (row-major, register 0 most
  // significant)
  std::vector<long> stride(R, 1);
  for (int r = R - 2; r >= 0; --r) stride[r] = stride[r + 1] * dims[r + 1];

  auto expand = [&](long compact, const std::vector<int>& regs) {
    long full = 0;
    for (int i = static_cast<int>(regs.size()) - 1; i >= 0; --i) {
      int r = regs[i];
      full += (compact % dims[r]) * stride[r];
      compact /= dims[r];
    }
    return full;
  };

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (long i = 0; i < dk; ++i) {
    long fi = expand(i, keep_regs);
    for (long j = 0; j < dk; ++j) {
      long fj = expand(j, keep_regs);
      Cplx acc = 0.0;
      for (long t = 0; t < dt; ++t) {
        long ft = expand(t, trace_regs);
        acc += M(fi + ft, fj + ft);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Eigen::MatrixXcd gradient_operator_D(const AlgebraicForm& A,
                                     const DensityMatrix& rho) {
  check_cap(A);
  if (rho.dim() != A.N)
    throw std::invalid_argument("density matrix dimension does not match N");
  AuxiliaryOperator MD = build_MD(A);
  if (A.p == 1) return MD.data.cast<Cplx>();
  Eigen::MatrixXcd left = copies_times_identity(rho, A.p, A.N);
  Eigen::MatrixXcd prod = left * MD.data.cast<Cplx>();
  std::vector<long> dims(A.p, A.N);
  return partial_trace(prod, dims, {A.p - 1});
}

Eigen::MatrixXcd hessian_part_H1(const AlgebraicForm& A,
                                 const DensityMatrix& rho) {
  check_cap(A);
  if (A.p == 1) return Eigen::MatrixXcd::Zero(A.N, A.N);
  AuxiliaryOperator MH1 = build_MH1(A);
  Eigen::MatrixXcd right = copies_times_identity(rho, A.p, A.N);
  Eigen::MatrixXcd prod = MH1.data.cast<Cplx>() * right;
  std::vector<long> dims(A.p, A.N);
  return partial_trace(prod, dims, {A.p - 1});
}

Eigen::MatrixXcd hessian_operator(const AlgebraicForm& A,
                                  const DensityMatrix& rho) {
  if (A.p == 1) return gradient_operator_D(A, rho);
  return hessian_part_H1(A, rho) + gradient_operator_D(A, rho);
}

Eigen::MatrixXcd gradient_operator_contracted(
    const AlgebraicForm& A, const std::vector<Eigen::MatrixXcd>& copies) {
  const int p = A.p, N = A.N;
  if (static_cast<int>(copies.size()) != p - 1)
    throw std::invalid_argument("expected p-1 copy states");
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
  long rd[16], cd[16];
  for (const auto& e : A.entries) {
    for (int j = 0; j < p; ++j) {
      index_digits(e.row, p, N, rd);
      index_digits(e.col, p, N, cd);
      std::swap(rd[j], rd[p - 1]);
      std::swap(cd[j], cd[p - 1]);
      Cplx w = e.value;
      for (int m = 0; m < p - 1; ++m) w *= copies[m](cd[m], rd[m]);
      D(rd[p - 1], cd[p - 1]) += w;
    }
  }
  return D;
}

Eigen::MatrixXcd hessian_part_contracted(
    const AlgebraicForm& A, const std::vector<Eigen::MatrixXcd>& copies) {
  const int p = A.p, N = A.N;
  Eigen::MatrixXcd H1 = Eigen::MatrixXcd::Zero(N, N);
  if (p < 2) return H1;
  if (static_cast<int>(copies.size()) != p - 1)
    throw std::invalid_argument("expected p-1 copy states");
  long ad[16], bd[16], rd[16], cd[16];
  int g[16];
  for (const auto& e : A.entries) {
    index_digits(e.row, p, N, ad);
    index_digits(e.col, p, N, bd);
    for (int j = 0; j < p; ++j) {
      for (int k = 0; k < p; ++k) {
        if (j == k) continue;
        int m = 0;
        for (int r = 0; r < p; ++r)
          if (r != j && r != k) g[m++] = r;
        for (int s = 0; s < p - 2; ++s) {
          rd[s] = ad[g[s]];
          cd[s] = bd[g[s]];
        }
        rd[p - 2] = ad[j];
        rd[p - 1] = ad[k];
        cd[p - 2] = bd[k];
        cd[p - 1] = bd[j];
        Cplx w = 2.0 * e.value;
        for (int s = 0; s < p - 1; ++s) w *= copies[s](cd[s], rd[s]);
        H1(rd[p - 1], cd[p - 1]) += w;
      }
    }
  }
  return H1;
}

Eigen::MatrixXcd gradient_operator_contracted(const AlgebraicForm& A,
                                              const DensityMatrix& rho) {
  std::vector<Eigen::MatrixXcd> copies(std::max(0, A.p - 1), rho.mat);
  return gradient_operator_contracted(A, copies);
}

Eigen::MatrixXcd hessian_part_contracted(const AlgebraicForm& A,
                                         const DensityMatrix& rho) {
  std::vector<Eigen::MatrixXcd> copies(std::max(0, A.p - 1), rho.mat);
  return hessian_part_contracted(A, copies);
}

}  // namespace qpd
