#pragma once

#include <Eigen/Dense>

#include "qpd/operators.hpp"
#include "qpd/rng.hpp"
#include "qpd/tensor_poly.hpp"

namespace qpd {

// Random sparse instances for tests and the validate suite. Problems are
// emitted as problem-file text and run through load_problem so they carry
// exactly the loader's symmetrization semantics.
std::string random_problem_text(Rng& rng, int p, int n, bool with_inhom);
PolynomialProblem random_problem(Rng& rng, int p, int n, bool with_inhom);

Eigen::VectorXd random_unit_vector(Rng& rng, int N);

// random mixed state (normalized Wishart-style)
DensityMatrix random_density(Rng& rng, int N);

}  // namespace qpd
