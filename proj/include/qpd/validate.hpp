#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpd/tensor_poly.hpp"

namespace qpd {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Runs the per-problem invariant suite: finite-difference consistency of the
// classical gradient/Hessian, the Euler identity, norm bounds, the
// partial-trace operator identities, operator sparsity and hermiticity,
// channel/trotter sanity, phase-estimation round trips, quantum/classical
// step equivalence and the success-probability bounds. Deterministic for a
// fixed seed.
std::vector<CheckResult> validate_problem(const PolynomialProblem& P,
                                          std::uint64_t seed);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace qpd
