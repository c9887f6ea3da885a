#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qpd/descent.hpp"

namespace qpd {

// Resolved configuration for one CLI invocation. run_experiment writes the
// CSV (header row, data rows, trailing '# key=value' metadata block) and
// returns the process exit code: 0 success, 1 validation failure, 2 usage.
struct ExperimentConfig {
  std::string command;              // run | sweep | resources | figures | validate
  std::string problem_path;
  std::string preset;               // fig1 | fig2 | fig3
  std::string method = "gd";        // gd | newton | newton-sf
  std::string mode = "ideal";       // classical | ideal | circuit | sampled
  int steps = 100;
  std::vector<double> eta = {0.05};
  int pe_bits = 8;
  int trotter_m = 64;
  double beta = 0.0;
  double lambda_cut = 0.0;          // 0 -> Lambda_H / 32
  double tau = 0.5;
  std::string which = "D";          // sweep: D | H1
  std::vector<int> sweep_m = {16, 64, 256};
  std::vector<double> sweep_beta = {0.0, 0.1};
  int reps = 50;
  int random_problems = 20;         // validate battery size
  std::vector<double> x0;           // empty -> uniform vector
  std::uint64_t seed = 42;
  std::string out_path;             // empty -> stdout

  // resources parameters
  ResourceParams resources;
};

int run_experiment(const ExperimentConfig& cfg, std::ostream& csv,
                   std::ostream& diag);

}  // namespace qpd
