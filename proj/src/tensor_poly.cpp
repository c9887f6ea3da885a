#include "qpd/tensor_poly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace qpd {

namespace {

// register digits of a linear index, register 1 most significant
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

void check_dim(const PolynomialProblem& P, const Eigen::VectorXd& x) {
  if (x.size() != P.hom.N)
    throw std::invalid_argument("vector dimension " + std::to_string(x.size()) +
                                " does not match problem dimension N=" +
                                std::to_string(P.hom.N));
}

// Gradient and scalar pieces of one inhomogeneous term at x.
struct InhomEval {
  double u = 0.0;                    // c^T x
  std::vector<double> q;             // x^T B_i x
  std::vector<Eigen::VectorXd> Bx;   // B_i x
};

InhomEval eval_term(const InhomTerm& t, const Eigen::VectorXd& x) {
  InhomEval e;
  e.u = t.c.dot(x);
  e.q.reserve(t.B.size());
  e.Bx.reserve(t.B.size());
  for (const auto& B : t.B) {
    Eigen::VectorXd bx = B * x;
    e.q.push_back(x.dot(bx));
    e.Bx.push_back(std::move(bx));
  }
  return e;
}

double prod_except(const std::vector<double>& q, int skip) {
  double v = 1.0;
  for (int i = 0; i < static_cast<int>(q.size()); ++i)
    if (i != skip) v *= q[i];
  return v;
}

double prod_except2(const std::vector<double>& q, int s, int t) {
  double v = 1.0;
  for (int i = 0; i < static_cast<int>(q.size()); ++i)
    if (i != s && i != t) v *= q[i];
  return v;
}

}  // namespace

Eigen::MatrixXd AlgebraicForm::dense() const {
  long d = dim();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (const auto& e : entries) A(e.row, e.col) += e.value;
  return A;
}

PolynomialProblem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_problem(ss.str());
}

PolynomialProblem load_problem(const std::string& text) {
  PolynomialProblem P;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool header_seen = false;
  int header_line = 0;
  double lambda_override = 0.0;
  bool have_override = false;

  // duplicate entries are summed here before symmetrization
  std::map<std::pair<long, long>, double> acc;
  InhomTerm* open_term = nullptr;

  auto parse_double = [&](const std::string& tok) {
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      throw ParseError(lineno, "expected a number, got '" + tok + "'");
    }
    if (pos != tok.size())
      throw ParseError(lineno, "trailing characters in number '" + tok + "'");
    if (!std::isfinite(v))
      throw ParseError(lineno, "non-finite value '" + tok + "'");
    return v;
  };
  auto parse_long = [&](const std::string& tok) {
    size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(tok, &pos);
    } catch (const std::exception&) {
      throw ParseError(lineno, "expected an integer, got '" + tok + "'");
    }
    if (pos != tok.size())
      throw ParseError(lineno, "trailing characters in integer '" + tok + "'");
    return v;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;

    if (!header_seen) {
      header_line = lineno;
      bool have_p = false, have_n = false;
      for (const auto& kv : tok) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw ParseError(lineno, "header expects key=value tokens, got '" + kv + "'");
        std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "p") {
          P.hom.p = static_cast<int>(parse_long(val));
          have_p = true;
        } else if (key == "n") {
          P.hom.n = static_cast<int>(parse_long(val));
          have_n = true;
        } else if (key == "lambda_A") {
          lambda_override = parse_double(val);
          have_override = true;
        } else
          throw ParseError(lineno, "unknown header key '" + key + "'");
      }
      if (!have_p || !have_n)
        throw ParseError(lineno, "header must provide both p=<int> and n=<int>");
      if (P.hom.p < 1) throw ParseError(lineno, "p must be >= 1");
      if (P.hom.n < 1) throw ParseError(lineno, "n must be >= 1");
      P.hom.N = 1 << P.hom.n;
      double dimf = std::pow(static_cast<double>(P.hom.N), P.hom.p);
      if (dimf > static_cast<double>(kMaxTensorDim))
        throw ParseError(lineno, "N^p = " + std::to_string(static_cast<long>(dimf)) +
                                     " exceeds the desk-scale cap of " +
                                     std::to_string(kMaxTensorDim));
      header_seen = true;
      continue;
    }

    long dim = P.hom.dim();
    if (tok[0] == "hom") {
      if (tok.size() != 4)
        throw ParseError(lineno, "hom expects: hom <row> <col> <value>");
      long r = parse_long(tok[1]), c = parse_long(tok[2]);
      double v = parse_double(tok[3]);
      if (r < 0 || r >= dim || c < 0 || c >= dim)
        throw ParseError(lineno, "index out of range [0, " + std::to_string(dim) + ")");
      acc[{r, c}] += v;
    } else if (tok[0] == "inhom") {
      if (tok.size() != 2 || tok[1].rfind("j=", 0) != 0)
        throw ParseError(lineno, "inhom expects: inhom j=<int>");
      int j = static_cast<int>(parse_long(tok[1].substr(2)));
      // Degree of the term is 2j-1 <= 2p-1, so j runs up to p. (For p=1 this
      // admits the plain linear term c^T x.)
      if (j < 1 || j > P.hom.p)
        throw ParseError(lineno, "inhom level j must satisfy 1 <= j <= p");
      InhomTerm term;
      term.level = j;
      term.c = Eigen::VectorXd::Zero(P.hom.N);
      term.B.assign(j - 1, Eigen::MatrixXd::Zero(P.hom.N, P.hom.N));
      P.inhom.push_back(std::move(term));
      open_term = &P.inhom.back();
    } else if (tok[0] == "c") {
      if (!open_term) throw ParseError(lineno, "c line outside an inhom block");
      if (tok.size() != 3) throw ParseError(lineno, "c expects: c <i> <value>");
      long i = parse_long(tok[1]);
      if (i < 0 || i >= P.hom.N)
        throw ParseError(lineno, "c index out of range [0, " + std::to_string(P.hom.N) + ")");
      open_term->c(i) += parse_double(tok[2]);
    } else if (tok[0] == "B") {
      if (!open_term) throw ParseError(lineno, "B line outside an inhom block");
      if (tok.size() != 5)
        throw ParseError(lineno, "B expects: B <k> <row> <col> <value>");
      long k = parse_long(tok[1]);
      if (k < 1 || k > static_cast<long>(open_term->B.size()))
        throw ParseError(lineno, "B matrix index k out of range [1, " +
                                     std::to_string(open_term->B.size()) + "]");
      long r = parse_long(tok[2]), c = parse_long(tok[3]);
      if (r < 0 || r >= P.hom.N || c < 0 || c >= P.hom.N)
        throw ParseError(lineno, "B index out of range [0, " + std::to_string(P.hom.N) + ")");
      open_term->B[k - 1](r, c) += parse_double(tok[4]);
    } else {
      throw ParseError(lineno, "unknown directive '" + tok[0] + "'");
    }
  }
  if (!header_seen) throw ParseError(lineno ? lineno : 1, "missing header line 'p=<int> n=<int>'");

  // Symmetrize A over the matrix transpose and all per-register transposes:
  // averaging over this group leaves the polynomial unchanged (the monomial
  // x-contraction is fully symmetric) and puts A into the span of products
  // of symmetric per-register factors, which the operator identities need.
  const int p = P.hom.p, N = P.hom.N;
  std::map<std::pair<long, long>, double> sym;
  long rd[16], cd[16], rd2[16], cd2[16];
  double w = 1.0 / static_cast<double>(1 << p);
  for (const auto& [rc, v] : acc) {
    index_digits(rc.first, p, N, rd);
    index_digits(rc.second, p, N, cd);
    for (int mask = 0; mask < (1 << p); ++mask) {
      for (int r = 0; r < p; ++r) {
        bool swap = (mask >> r) & 1;
        rd2[r] = swap ? cd[r] : rd[r];
        cd2[r] = swap ? rd[r] : cd[r];
      }
      sym[{digits_index(rd2, p, N), digits_index(cd2, p, N)}] += v * w;
    }
  }
  P.hom.entries.clear();
  for (const auto& [rc, v] : sym)
    if (v != 0.0) P.hom.entries.push_back({rc.first, rc.second, v});

  for (auto& t : P.inhom)
    for (auto& B : t.B) B = ((B + B.transpose()) / 2.0).eval();

  NormBounds nb = norm_bounds(P);
  P.hom.lambda_A_raw = nb.lambda_A_raw;
  if (have_override) {
    if (lambda_override < nb.lambda_A_raw - 1e-12)
      throw ParseError(header_line,
                       "lambda_A=" + std::to_string(lambda_override) +
                           " is below the exact spectral norm " +
                           std::to_string(nb.lambda_A_raw));
    P.hom.lambda_A = std::max(1.0, lambda_override);
  } else {
    P.hom.lambda_A = nb.lambda_A;
  }
  return P;
}

double evaluate(const PolynomialProblem& P, const Eigen::VectorXd& x) {
  check_dim(P, x);
  const int p = P.hom.p, N = P.hom.N;
  long rd[16], cd[16];
  double f = 0.0;
  for (const auto& e : P.hom.entries) {
    index_digits(e.row, p, N, rd);
    index_digits(e.col, p, N, cd);
    double m = e.value;
    for (int r = 0; r < p; ++r) m *= x(rd[r]) * x(cd[r]);
    f += 0.5 * m;
  }
  for (const auto& t : P.inhom) {
    InhomEval e = eval_term(t, x);
    f += e.u * prod_except(e.q, -1);
  }
  return f;
}

Eigen::VectorXd gradient_classical(const PolynomialProblem& P,
                                   const Eigen::VectorXd& x) {
  check_dim(P, x);
  const int p = P.hom.p, N = P.hom.N;
  const int m = 2 * p;
  long idx[32];
  double pre[33], suf[33];
  Eigen::VectorXd g = Eigen::VectorXd::Zero(N);
  for (const auto& e : P.hom.entries) {
    index_digits(e.row, p, N, idx);
    index_digits(e.col, p, N, idx + p);
    pre[0] = 1.0;
    for (int k = 0; k < m; ++k) pre[k + 1] = pre[k] * x(idx[k]);
    suf[m] = 1.0;
    for (int k = m - 1; k >= 0; --k) suf[k] = suf[k + 1] * x(idx[k]);
    for (int s = 0; s < m; ++s)
      g(idx[s]) += 0.5 * e.value * pre[s] * suf[s + 1];
  }
  for (const auto& t : P.inhom) {
    InhomEval e = eval_term(t, x);
    g += t.c * prod_except(e.q, -1);
    for (int i = 0; i < static_cast<int>(t.B.size()); ++i)
      g += e.u * 2.0 * prod_except(e.q, i) * e.Bx[i];
  }
  return g;
}

Eigen::MatrixXd hessian_classical(const PolynomialProblem& P,
                                  const Eigen::VectorXd& x) {
  check_dim(P, x);
  const int p = P.hom.p, N = P.hom.N;
  const int m = 2 * p;
  long idx[32];
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
  for (const auto& e : P.hom.entries) {
    index_digits(e.row, p, N, idx);
    index_digits(e.col, p, N, idx + p);
    for (int s = 0; s < m; ++s) {
      for (int t = s + 1; t < m; ++t) {
        double w = 0.5 * e.value;
        for (int k = 0; k < m; ++k)
          if (k != s && k != t) w *= x(idx[k]);
        H(idx[s], idx[t]) += w;
        H(idx[t], idx[s]) += w;
      }
    }
  }
  for (const auto& t : P.inhom) {
    InhomEval e = eval_term(t, x);
    const int nb = static_cast<int>(t.B.size());
    Eigen::VectorXd gq = Eigen::VectorXd::Zero(N);  // grad of prod q_i
    for (int i = 0; i < nb; ++i) gq += 2.0 * prod_except(e.q, i) * e.Bx[i];
    H += t.c * gq.transpose() + gq * t.c.transpose();
    for (int i = 0; i < nb; ++i) {
      H += e.u * 2.0 * prod_except(e.q, i) * t.B[i];
      for (int k = 0; k < nb; ++k) {
        if (k == i) continue;
        H += e.u * 4.0 * prod_except2(e.q, i, k) *
             (e.Bx[i] * e.Bx[k].transpose());
      }
    }
  }
  return H;
}

NormBounds norm_bounds(const PolynomialProblem& P) {
  NormBounds nb;
  Eigen::MatrixXd A = P.hom.dense();
  if (A.rows() > 0 && P.hom.entries.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    nb.lambda_A_raw = es.eigenvalues().cwiseAbs().maxCoeff();
  } else {
    nb.lambda_A_raw = 0.0;
  }
  nb.lambda_A = std::max(1.0, nb.lambda_A_raw);
  nb.lambda_D = P.hom.p * nb.lambda_A_raw;
  nb.lambda_H = static_cast<double>(P.hom.p) * P.hom.p * nb.lambda_A_raw;
  long d = P.hom.dim();
  std::vector<long> row_nnz(d, 0), col_nnz(d, 0);
  for (const auto& e : P.hom.entries) {
    if (e.value == 0.0) continue;
    ++row_nnz[e.row];
    ++col_nnz[e.col];
  }
  nb.s_A = 0;
  for (long i = 0; i < d; ++i)
    nb.s_A = std::max({nb.s_A, row_nnz[i], col_nnz[i]});
  return nb;
}

}  // namespace qpd
