#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qpd/phase_estimation.hpp"
#include "qpd/tensor_poly.hpp"

namespace qpd {

enum class Method { gradient, newton, newton_saddle_free };
enum class OperatorBackend { analytic, partial_trace, sampled_channel };

class NullStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepConfig {
  double eta = 0.05;
  double xi_D = 0.0;          // 0 -> min(2 eta, 0.9 / Lambda_D)
  double xi_H = 0.0;          // 0 -> min(2 eta, 0.9 lambda_cut)
  double epsilon_step = 0.0;  // eps_D / eps_nwt accuracy bookkeeping
  PEConfig pe;                // pe.lambda_cut 0 -> Lambda_H / 32
  Method method = Method::gradient;
  OperatorBackend backend = OperatorBackend::analytic;
  double beta = 0.0;          // sampled_channel perturbation magnitude
  int channel_steps = 64;     // sampled_channel averaging steps
  std::uint64_t rng_seed = 42;
  bool sample_measurements = false;  // Bernoulli accept/reject realism
};

struct StepRecord {
  Eigen::VectorXcd state_after;
  double objective = 0.0;
  double success_prob = 0.0;
  double C = 0.0;       // normalization constant of the post-selected state
  double theta = 0.0;
  double epsilon_accum = 0.0;
  long samples_consumed = 1;
  int repetitions = 1;  // post-selection attempts (sampling mode)
  bool gradient_filtered = false;  // newton: gradient fully in the cut subspace
};

struct DescentTrajectory {
  Eigen::VectorXcd x0;
  std::vector<StepRecord> steps;
  double total_samples = 1.0;  // product over steps (copy-tree accounting)
  std::vector<std::string> warnings;
};

// theta with cos(theta) = 1 / sqrt(1 + eta^2/xi^2)
double choose_theta(double eta, double xi);

StepRecord gradient_step(const Eigen::VectorXcd& x, const PolynomialProblem& P,
                         const StepConfig& cfg);
StepRecord newton_step(const Eigen::VectorXcd& x, const PolynomialProblem& P,
                       const StepConfig& cfg);

DescentTrajectory run_descent(const PolynomialProblem& P,
                              const Eigen::VectorXcd& x0,
                              const std::vector<StepConfig>& schedule);

struct ResourceParams {
  double p = 1, s_A = 1;
  double lambda_D = 1, lambda_H = 1;
  double lambda = 0;  // 0 -> max(lambda_D, lambda_H)
  double tau = 1;
  double eps = 1, eps_D = 1, eps_nwt = 1;
  double delta = 1;
  int T = 0;
  Method method = Method::gradient;
};

// The paper's Landau expressions evaluated with unit constants.
struct ResourceEstimate {
  double copies_sim_D = 0;    // simulate e^{-iD tau} with imperfect states
  double queries_sim_D = 0;
  double gates_sim_D = 0;
  double copies_step = 0;     // one descent step
  double queries_step = 0;
  double gates_step = 0;
  double copies_multi_step = 0;  // T steps, copy-tree exponent
  std::string caveat = "asymptotic, unit constants";
};

ResourceEstimate estimate_resources(const ResourceParams& params);

}  // namespace qpd
