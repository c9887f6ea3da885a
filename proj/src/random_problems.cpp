#include "qpd/random_problems.hpp"

#include <cstdio>
#include <string>

namespace qpd {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string random_problem_text(Rng& rng, int p, int n, bool with_inhom) {
  const long N = 1L << n;
  long dim = 1;
  for (int i = 0; i < p; ++i) dim *= N;
  std::string text = "p=" + std::to_string(p) + " n=" + std::to_string(n) + "\n";
  long nent = 2 + static_cast<long>(rng.integer(std::max<long>(1, dim)));
  for (long e = 0; e < nent; ++e) {
    long r = static_cast<long>(rng.integer(dim));
    long c = static_cast<long>(rng.integer(dim));
    double v = rng.uniform(-1.0, 1.0);
    if (v == 0.0) v = 0.5;
    text += "hom " + std::to_string(r) + " " + std::to_string(c) + " " +
            num(v) + "\n";
  }
  if (with_inhom) {
    int j = 1 + static_cast<int>(rng.integer(p));
    text += "inhom j=" + std::to_string(j) + "\n";
    for (long i = 0; i < N; ++i)
      text += "c " + std::to_string(i) + " " + num(rng.uniform(-1.0, 1.0)) + "\n";
    for (int k = 1; k <= j - 1; ++k) {
      for (long r = 0; r < N; ++r)
        for (long c = r; c < N; ++c) {
          double v = rng.uniform(-0.5, 0.5);
          text += "B " + std::to_string(k) + " " + std::to_string(r) + " " +
                  std::to_string(c) + " " + num(v) + "\n";
          if (c != r)
            text += "B " + std::to_string(k) + " " + std::to_string(c) + " " +
                    std::to_string(r) + " " + num(v) + "\n";
        }
    }
  }
  return text;
}

PolynomialProblem random_problem(Rng& rng, int p, int n, bool with_inhom) {
  return load_problem(random_problem_text(rng, p, n, with_inhom));
}

Eigen::VectorXd random_unit_vector(Rng& rng, int N) {
  Eigen::VectorXd x(N);
  double norm = 0.0;
  do {
    for (int i = 0; i < N; ++i) x(i) = rng.normal();
    norm = x.norm();
  } while (norm < 1e-8);
  return x / norm;
}

DensityMatrix random_density(Rng& rng, int N) {
  Eigen::MatrixXcd G(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) G(i, j) = Cplx(rng.normal(), rng.normal());
  Eigen::MatrixXcd W = G * G.adjoint();
  DensityMatrix rho;
  rho.mat = W / W.trace().real();
  return rho;
}

}  // namespace qpd
