#include "qpd/classical_ref.hpp"

#include <stdexcept>

#include "qpd/phase_estimation.hpp"

namespace qpd {

namespace {

double eta_at(const std::vector<double>& etas, int t) {
  if (etas.empty()) throw std::invalid_argument("empty step-size schedule");
  return etas.size() == 1 ? etas[0] : etas.at(t);
}

ClassicalTrajectory iterate(const PolynomialProblem& P,
                            const Eigen::VectorXd& x0,
                            const std::vector<double>& etas, int T,
                            ClassicalMethod method, double lambda_cut) {
  if (std::abs(x0.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("x0 must be unit norm");
  ClassicalTrajectory traj;
  traj.method = method;
  Eigen::VectorXd x = x0 / x0.norm();
  traj.points.push_back(x);
  traj.objectives.push_back(evaluate(P, x));
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd g = gradient_classical(P, x);
    Eigen::VectorXd step;
    if (method == ClassicalMethod::pgd) {
      step = g;
    } else {
      Eigen::MatrixXcd Hinv =
          wc_pseudo_inverse(hessian_classical(P, x).cast<Cplx>(), lambda_cut,
                            method == ClassicalMethod::pnewton_saddle_free);
      step = (Hinv * g.cast<Cplx>()).real();
    }
    Eigen::VectorXd u = x - eta_at(etas, t) * step;
    if (u.norm() < 1e-14)
      throw std::runtime_error(
          "projected update is the null vector; cannot renormalize (step " +
          std::to_string(t) + ")");
    x = u / u.norm();
    traj.points.push_back(x);
    traj.objectives.push_back(evaluate(P, x));
  }
  return traj;
}

}  // namespace

ClassicalTrajectory projected_gradient_descent(const PolynomialProblem& P,
                                               const Eigen::VectorXd& x0,
                                               const std::vector<double>& etas,
                                               int T) {
  return iterate(P, x0, etas, T, ClassicalMethod::pgd, 1.0);
}

ClassicalTrajectory projected_newton(const PolynomialProblem& P,
                                     const Eigen::VectorXd& x0,
                                     const std::vector<double>& etas, int T,
                                     bool saddle_free, double lambda_cut) {
  if (lambda_cut <= 0.0)
    lambda_cut = std::max(norm_bounds(P).lambda_H / 32.0, 1e-12);
  return iterate(P, x0, etas, T,
                 saddle_free ? ClassicalMethod::pnewton_saddle_free
                             : ClassicalMethod::pnewton,
                 lambda_cut);
}

FigurePreset figure_preset(const std::string& name) {
  FigurePreset fp;
  fp.name = name;
  if (name == "fig2") {
    fp.problem = load_problem(
        "p=1 n=1\n"
        "hom 0 0 0.3\n"
        "hom 0 1 -0.2\n"
        "hom 1 0 -0.2\n"
        "hom 1 1 0.5\n");
    Eigen::VectorXd x0(2);
    x0 << -0.707, 0.707;  // only approximately unit in the source; renormalize
    fp.x0 = x0 / x0.norm();
    fp.eta = 0.05;
    fp.T = 500;
  } else if (name == "fig1" || name == "fig3") {
    fp.problem = load_problem(
        "p=1 n=1\n"
        "hom 0 0 0.2\n"
        "hom 0 1 0.2\n"
        "hom 1 0 0.2\n"
        "hom 1 1 0.6\n"
        "inhom j=1\n"
        "c 0 0.3\n"
        "c 1 0.2\n");
    Eigen::VectorXd x0(2);
    x0 << 1.0, 2.0;
    fp.x0 = x0 / x0.norm();
    fp.eta = 0.2;
    fp.T = 50;
  } else {
    throw std::invalid_argument("unknown figure preset '" + name +
                                "' (expected fig1, fig2 or fig3)");
  }
  return fp;
}

}  // namespace qpd
