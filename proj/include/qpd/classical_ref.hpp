#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qpd/tensor_poly.hpp"

namespace qpd {

enum class ClassicalMethod { pgd, pnewton, pnewton_saddle_free };

struct ClassicalTrajectory {
  std::vector<Eigen::VectorXd> points;  // T+1 unit vectors, x0 first
  std::vector<double> objectives;
  ClassicalMethod method = ClassicalMethod::pgd;
};

// x <- normalize(x - eta grad f(x)), T times. etas may hold a single value
// (used for every step) or one value per step.
ClassicalTrajectory projected_gradient_descent(const PolynomialProblem& P,
                                               const Eigen::VectorXd& x0,
                                               const std::vector<double>& etas,
                                               int T);

// x <- normalize(x - eta Hinv grad f(x)) with the well-conditioned
// pseudo-inverse of the Hessian (absolute-value variant when saddle_free).
ClassicalTrajectory projected_newton(const PolynomialProblem& P,
                                     const Eigen::VectorXd& x0,
                                     const std::vector<double>& etas, int T,
                                     bool saddle_free, double lambda_cut);

struct FigurePreset {
  std::string name;
  PolynomialProblem problem;
  Eigen::VectorXd x0;
  double eta = 0.0;
  int T = 0;
};

// fig1: quadratic with linear term, eta = 0.2, x0 = (1,2) normalized
// fig2: homogeneous quadratic, eta = 0.05, x0 = (-0.707, 0.707) normalized
// fig3: same parameters as fig1
FigurePreset figure_preset(const std::string& name);

}  // namespace qpd
