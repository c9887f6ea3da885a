#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qpd/random_problems.hpp"
#include "qpd/tensor_poly.hpp"

using namespace qpd;

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::VectorXd fd_gradient(const PolynomialProblem& P, const Eigen::VectorXd& x,
                            double h) {
  Eigen::VectorXd g(x.size());
  for (long i = 0; i < x.size(); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(x.size());
    e(i) = h;
    g(i) = (evaluate(P, x + e) - evaluate(P, x - e)) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const PolynomialProblem& P, const Eigen::VectorXd& x,
                           double h) {
  const long N = x.size();
  Eigen::MatrixXd H(N, N);
  for (long i = 0; i < N; ++i)
    for (long j = 0; j < N; ++j) {
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(N), ej = Eigen::VectorXd::Zero(N);
      ei(i) = h;
      ej(j) = h;
      H(i, j) = (evaluate(P, x + ei + ej) - evaluate(P, x + ei - ej) -
                 evaluate(P, x - ei + ej) + evaluate(P, x - ei - ej)) /
                (4.0 * h * h);
    }
  return H;
}

const char* kFig2 =
    "p=1 n=1\n"
    "hom 0 0 0.3\n"
    "hom 0 1 -0.2\n"
    "hom 1 0 -0.2\n"
    "hom 1 1 0.5\n";

// p=2 problem with A = B ⊗ C for symmetric B, C
PolynomialProblem kron_problem(const Eigen::MatrixXd& B,
                               const Eigen::MatrixXd& C) {
  std::string text = "p=2 n=1\n";
  Eigen::MatrixXd A = kron(B, C);
  for (long i = 0; i < 4; ++i)
    for (long j = 0; j < 4; ++j)
      if (A(i, j) != 0.0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "hom %ld %ld %.17g\n", i, j, A(i, j));
        text += buf;
      }
  return load_problem(text);
}

}  // namespace

TEST_CASE("loads the quadratic example problem") {
  PolynomialProblem P = load_problem(kFig2);
  CHECK(P.hom.p == 1);
  CHECK(P.hom.N == 2);
  Eigen::MatrixXd A = P.hom.dense();
  CHECK(A(0, 0) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(A(0, 1) == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(A(1, 0) == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(A(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("header-only file is the zero polynomial") {
  PolynomialProblem P = load_problem("p=1 n=1\n");
  CHECK(P.hom.entries.empty());
  Eigen::VectorXd x(2);
  x << 0.3, -0.9;
  CHECK(evaluate(P, x) == 0.0);
  CHECK(gradient_classical(P, x).norm() == 0.0);
}

TEST_CASE("single off-diagonal entry is symmetrized") {
  PolynomialProblem P = load_problem("p=1 n=1\nhom 0 1 0.4\n");
  Eigen::MatrixXd A = P.hom.dense();
  CHECK(A(0, 1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(A(1, 0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(A(0, 0) == 0.0);
}

TEST_CASE("duplicate entries are summed before symmetrization") {
  PolynomialProblem P = load_problem("p=1 n=1\nhom 0 1 0.1\nhom 0 1 0.3\n");
  CHECK(P.hom.dense()(0, 1) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(load_problem("p=1\n"), ParseError);
  CHECK_THROWS_AS(load_problem("p=1 n=1\nhom 0 5 1.0\n"), ParseError);
  CHECK_THROWS_AS(load_problem("p=1 n=1\nhom 0 0 nan\n"), ParseError);
  CHECK_THROWS_AS(load_problem("p=1 n=1\nc 0 1.0\n"), ParseError);
  try {
    load_problem("p=1 n=1\nhom 0 0 1.0\nhom 9 0 1.0\n");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("desk-scale cap rejects oversized problems") {
  CHECK_THROWS_AS(load_problem("p=1 n=9\n"), ParseError);
  CHECK_THROWS_AS(load_problem("p=5 n=2\n"), ParseError);
  CHECK_NOTHROW(load_problem("p=4 n=2\n"));  // 4^4 = 256, right at the cap
}

TEST_CASE("evaluate matches the quadratic form") {
  PolynomialProblem P = load_problem(kFig2);
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  CHECK(evaluate(P, x) == doctest::Approx(0.15).epsilon(1e-14));
  x << 0.0, 0.0;
  CHECK(evaluate(P, x) == 0.0);
}

TEST_CASE("evaluate matches the dense Kronecker oracle for p=2") {
  Rng rng(11);
  Eigen::MatrixXd B(2, 2), C(2, 2);
  B << 0.7, -0.3, -0.3, 0.2;
  C << -0.1, 0.5, 0.5, 0.9;
  PolynomialProblem P = kron_problem(B, C);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x = random_unit_vector(rng, 2);
    double expect = 0.5 * (x.dot(B * x)) * (x.dot(C * x));
    CHECK(evaluate(P, x) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("gradient matches A x for the quadratic and zero at the origin") {
  PolynomialProblem P = load_problem(kFig2);
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  Eigen::VectorXd g = gradient_classical(P, x);
  CHECK(g(0) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(g(1) == doctest::Approx(-0.2).epsilon(1e-14));
  x.setZero();
  CHECK(gradient_classical(P, x).norm() == 0.0);
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    PolynomialProblem P = random_problem(rng, 2, 2, false);
    Eigen::VectorXd x = random_unit_vector(rng, 4);
    Eigen::VectorXd g = gradient_classical(P, x);
    Eigen::VectorXd gfd = fd_gradient(P, x, 1e-5);
    CHECK((g - gfd).norm() <= 1e-6 * std::max(1e-3, g.norm()));
  }
}

TEST_CASE("hessian is A for p=1 and matches finite differences for p=2") {
  PolynomialProblem P = load_problem(kFig2);
  Rng rng(4);
  Eigen::VectorXd x = random_unit_vector(rng, 2);
  CHECK((hessian_classical(P, x) - P.hom.dense()).norm() <= 1e-14);

  for (int t = 0; t < 15; ++t) {
    PolynomialProblem Q = random_problem(rng, 2, 1, false);
    Eigen::VectorXd y = random_unit_vector(rng, 2);
    Eigen::MatrixXd H = hessian_classical(Q, y);
    Eigen::MatrixXd Hfd = fd_hessian(Q, y, 1e-4);
    CHECK((H - Hfd).norm() <= 1e-4 * std::max(1e-3, H.norm()));
    CHECK((H - H.transpose()).norm() <= 1e-10);
  }
}

TEST_CASE("hessian includes inhomogeneous contributions") {
  // (c^T x) (x^T B x): full second derivative against finite differences
  PolynomialProblem P = load_problem(
      "p=2 n=1\n"
      "hom 0 0 0.4\n"
      "hom 3 3 -0.3\n"
      "inhom j=2\n"
      "c 0 0.5\n"
      "c 1 -0.2\n"
      "B 1 0 0 0.3\n"
      "B 1 0 1 0.1\n"
      "B 1 1 0 0.1\n"
      "B 1 1 1 -0.6\n");
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd x = random_unit_vector(rng, 2);
    CHECK((gradient_classical(P, x) - fd_gradient(P, x, 1e-5)).norm() <= 1e-6);
    Eigen::MatrixXd H = hessian_classical(P, x);
    CHECK((H - fd_hessian(P, x, 1e-4)).norm() <=
          1e-4 * std::max(1e-3, H.norm()));
  }
}

TEST_CASE("euler identity for the homogeneous part") {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    int p = 1 + static_cast<int>(rng.integer(2));
    PolynomialProblem P = random_problem(rng, p, 1, false);
    Eigen::VectorXd x = random_unit_vector(rng, 2);
    double f = evaluate(P, x);
    CHECK(std::abs(x.dot(gradient_classical(P, x)) - 2.0 * p * f) <=
          1e-10 * std::max(1.0, std::abs(f)));
  }
}

TEST_CASE("norm bounds for the quadratic example") {
  PolynomialProblem P = load_problem(kFig2);
  NormBounds nb = norm_bounds(P);
  double expect = 0.4 + std::sqrt(0.05);
  CHECK(nb.lambda_A_raw == doctest::Approx(expect).epsilon(1e-12));
  CHECK(nb.lambda_D == doctest::Approx(expect).epsilon(1e-12));
  CHECK(nb.lambda_H == doctest::Approx(expect).epsilon(1e-12));
  CHECK(nb.s_A == 2);
}

TEST_CASE("norm bounds for identity A with p=2") {
  std::string text = "p=2 n=1\n";
  for (int i = 0; i < 4; ++i) text += "hom " + std::to_string(i) + " " + std::to_string(i) + " 1.0\n";
  NormBounds nb = norm_bounds(load_problem(text));
  CHECK(nb.lambda_A_raw == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nb.lambda_D == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(nb.lambda_H == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("zero form records raw and clamped bounds") {
  NormBounds nb = norm_bounds(load_problem("p=1 n=1\n"));
  CHECK(nb.lambda_A_raw == 0.0);
  CHECK(nb.lambda_A == 1.0);
}

TEST_CASE("user lambda_A override must dominate the exact norm") {
  CHECK_THROWS_AS(load_problem("p=1 n=1 lambda_A=0.1\nhom 0 0 0.5\n"),
                  ParseError);
  PolynomialProblem P = load_problem("p=1 n=1 lambda_A=2.5\nhom 0 0 0.5\n");
  CHECK(P.hom.lambda_A == doctest::Approx(2.5));
}

TEST_CASE("norm bound invariants on random unit vectors") {
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    int p = 1 + static_cast<int>(rng.integer(2));
    PolynomialProblem P = random_problem(rng, p, 1, false);
    NormBounds nb = norm_bounds(P);
    Eigen::VectorXd x = random_unit_vector(rng, 2);
    CHECK(gradient_classical(P, x).norm() <= nb.lambda_D + 1e-9);
    Eigen::MatrixXd H = hessian_classical(P, x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    double hn = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(hn <= (2.0 * p * p - p) * nb.lambda_A_raw + 1e-9);
  }
}

TEST_CASE("dimension mismatch is rejected") {
  PolynomialProblem P = load_problem(kFig2);
  Eigen::VectorXd x(3);
  x.setZero();
  CHECK_THROWS_AS(evaluate(P, x), std::invalid_argument);
  CHECK_THROWS_AS(gradient_classical(P, x), std::invalid_argument);
}
