#include "qpd/phase_estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace qpd {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_hermitian(const Eigen::MatrixXcd& H, const char* who) {
  double dev = (H - H.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-10)
    throw std::invalid_argument(std::string(who) +
                                ": matrix deviates from Hermitian by " +
                                std::to_string(dev));
}

// squared magnitude of the phase-estimation kernel at outcome y for
// eigenphase theta (both in units of full turns)
double kernel_weight(double theta, long y, int bits) {
  const long T = 1L << bits;
  double delta = theta - static_cast<double>(y) / T;
  delta -= std::round(delta);  // fold into [-1/2, 1/2)
  if (std::abs(delta) < 1e-15) return 1.0;
  double num = std::sin(kPi * T * delta);
  double den = std::sin(kPi * delta);
  double amp = num / (den * T);
  return amp * amp;
}

double decode_outcome(long y, int bits, double t0) {
  const long T = 1L << bits;
  long s = y < T / 2 ? y : y - T;  // two's complement
  return -2.0 * kPi * static_cast<double>(s) / (T * t0);
}

// modal b-bit estimate of a single eigenvalue
double circuit_estimate(double lambda, int bits, double t0) {
  const long T = 1L << bits;
  double theta = -lambda * t0 / (2.0 * kPi);
  theta -= std::floor(theta);  // [0,1)
  long y0 = static_cast<long>(std::floor(theta * T)) % T;
  long y1 = (y0 + 1) % T;
  double w0 = kernel_weight(theta, y0, bits);
  double w1 = kernel_weight(theta, y1, bits);
  long y = w1 > w0 ? y1 : (w0 > w1 ? y0 : std::min(y0, y1));
  return decode_outcome(y, bits, t0);
}

}  // namespace

double PEConfig::circuit_resolution() const {
  return 2.0 * kPi / (static_cast<double>(1L << bits) * t0);
}

void PEConfig::validate(double lambda_max) const {
  if (epsilon < 0.0) throw std::invalid_argument("PEConfig: epsilon must be >= 0");
  if (mode == PEMode::circuit) {
    if (bits < 1 || bits > 12)
      throw std::invalid_argument("PEConfig: circuit bits must lie in [1, 12]");
    if (t0 <= 0.0) throw std::invalid_argument("PEConfig: t0 must be positive");
    if (lambda_max * t0 > kPi + 1e-12)
      throw std::invalid_argument(
          "PEConfig: phase aliasing, |lambda| t0 = " +
          std::to_string(lambda_max * t0) + " exceeds pi");
    if (epsilon > 0.0 && std::abs(epsilon - circuit_resolution()) >
                             0.5 * circuit_resolution())
      throw std::invalid_argument(
          "PEConfig: epsilon is inconsistent with 2 pi / (2^b t0)");
  }
}

SpectralDecomposition spectral_decomposition(const Eigen::MatrixXcd& H,
                                             double epsilon) {
  check_hermitian(H, "spectral_decomposition");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  SpectralDecomposition sd;
  sd.eigenvalues = es.eigenvalues();
  sd.eigenvectors = es.eigenvectors();
  sd.binned = sd.eigenvalues;
  if (epsilon > 0.0)
    for (long i = 0; i < sd.binned.size(); ++i)
      sd.binned(i) = std::round(sd.eigenvalues(i) / epsilon) * epsilon;
  return sd;
}

PEApplyResult apply_matrix_multiplication(const Eigen::MatrixXcd& H,
                                          const Eigen::VectorXcd& x,
                                          const PEConfig& cfg, double xi) {
  check_hermitian(H, "apply_matrix_multiplication");
  SpectralDecomposition sd = spectral_decomposition(H, cfg.epsilon);
  double lam_max = sd.eigenvalues.size()
                       ? sd.eigenvalues.cwiseAbs().maxCoeff()
                       : 0.0;
  cfg.validate(lam_max);
  if (xi <= 0.0 || xi * lam_max > 1.0 + 1e-12)
    throw std::invalid_argument(
        "apply_matrix_multiplication: xi * max|lambda| must lie in (0, 1]");

  const long n = sd.eigenvalues.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  double accept = 0.0;
  double in_norm2 = x.squaredNorm();
  for (long j = 0; j < n; ++j) {
    double lam = cfg.mode == PEMode::ideal
                     ? sd.binned(j)
                     : circuit_estimate(sd.eigenvalues(j), cfg.bits, cfg.t0);
    Cplx beta = sd.eigenvectors.col(j).adjoint() * x;
    out += xi * lam * beta * sd.eigenvectors.col(j);
    accept += (xi * lam) * (xi * lam) * std::norm(beta);
  }
  PEApplyResult r;
  r.vector = out;
  r.success_prob = in_norm2 > 0.0 ? accept / in_norm2 : 0.0;
  return r;
}

PEApplyResult apply_matrix_inversion(const Eigen::MatrixXcd& H,
                                     const Eigen::VectorXcd& y,
                                     const PEConfig& cfg, double xi_H,
                                     bool saddle_free) {
  check_hermitian(H, "apply_matrix_inversion");
  if (cfg.lambda_cut <= 0.0)
    throw std::invalid_argument("apply_matrix_inversion: lambda_cut must be positive");
  if (xi_H <= 0.0)
    throw std::invalid_argument("apply_matrix_inversion: xi_H must be positive");
  SpectralDecomposition sd = spectral_decomposition(H, cfg.epsilon);
  double lam_max = sd.eigenvalues.size()
                       ? sd.eigenvalues.cwiseAbs().maxCoeff()
                       : 0.0;
  cfg.validate(lam_max);

  const long n = sd.eigenvalues.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  double accept = 0.0;
  double in_norm2 = y.squaredNorm();
  for (long j = 0; j < n; ++j) {
    double lam = cfg.mode == PEMode::ideal
                     ? sd.binned(j)
                     : circuit_estimate(sd.eigenvalues(j), cfg.bits, cfg.t0);
    if (std::abs(lam) < cfg.lambda_cut) continue;  // rejected branch
    double scale = saddle_free ? xi_H / std::abs(lam) : xi_H / lam;
    // xi_H <= lambda_cut guarantees this a priori; larger xi_H is accepted
    // as long as every kept rotation amplitude stays physical
    if (std::abs(scale) > 1.0 + 1e-12)
      throw std::invalid_argument(
          "apply_matrix_inversion: xi_H / |lambda~| = " +
          std::to_string(std::abs(scale)) +
          " > 1 leaves the rotation undefined");
    Cplx c = sd.eigenvectors.col(j).adjoint() * y;
    out += scale * c * sd.eigenvectors.col(j);
    accept += scale * scale * std::norm(c);
  }
  PEApplyResult r;
  r.vector = out;
  r.success_prob = in_norm2 > 0.0 ? accept / in_norm2 : 0.0;
  return r;
}

PECircuitResult pe_circuit(const Eigen::MatrixXcd& U, const Eigen::VectorXcd& x,
                           int bits, double t0) {
  if (bits < 1 || bits > 12)
    throw std::invalid_argument("pe_circuit: bits must lie in [1, 12]");
  if (t0 <= 0.0) throw std::invalid_argument("pe_circuit: t0 must be positive");
  double unit = (U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols()))
                    .cwiseAbs()
                    .maxCoeff();
  if (unit > 1e-9)
    throw std::invalid_argument("pe_circuit: input deviates from unitary by " +
                                std::to_string(unit));
  const long N = x.size(), T = 1L << bits;

  // controlled powers: psi_l = U^l x, then the inverse Fourier transform on
  // the register gives amplitude (1/T) sum_l e^{-2 pi i l y / T} psi_l at
  // outcome y
  std::vector<Eigen::VectorXcd> psi(T);
  psi[0] = x;
  for (long l = 1; l < T; ++l) psi[l] = U * psi[l - 1];

  PECircuitResult res;
  res.histogram = Eigen::VectorXd::Zero(T);
  res.decoded = Eigen::VectorXd::Zero(T);
  res.joint_state = Eigen::VectorXcd::Zero(N * T);
  for (long y = 0; y < T; ++y) {
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(N);
    for (long l = 0; l < T; ++l) {
      double ang = -2.0 * kPi * static_cast<double>(l) * y / T;
      amp += std::exp(Cplx(0.0, ang)) * psi[l];
    }
    amp /= static_cast<double>(T);
    res.histogram(y) = amp.squaredNorm();
    res.decoded(y) = decode_outcome(y, bits, t0);
    for (long i = 0; i < N; ++i) res.joint_state(i * T + y) = amp(i);
  }
  res.modal_outcome = 0;
  for (long y = 1; y < T; ++y)
    if (res.histogram(y) > res.histogram(res.modal_outcome))
      res.modal_outcome = static_cast<int>(y);
  res.modal_eigenvalue = res.decoded(res.modal_outcome);
  return res;
}

std::string histogram_csv(const PECircuitResult& r) {
  std::string out = "outcome,probability,eigenvalue\n";
  char buf[96];
  for (long y = 0; y < r.histogram.size(); ++y) {
    std::snprintf(buf, sizeof buf, "%ld,%.12g,%.12g\n", y, r.histogram(y),
                  r.decoded(y));
    out += buf;
  }
  return out;
}

Eigen::MatrixXcd wc_pseudo_inverse(const Eigen::MatrixXcd& H, double lambda_cut,
                                   bool saddle_free) {
  check_hermitian(H, "wc_pseudo_inverse");
  if (lambda_cut <= 0.0)
    throw std::invalid_argument("wc_pseudo_inverse: lambda_cut must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(es.eigenvalues().size());
  for (long j = 0; j < inv.size(); ++j) {
    double lam = es.eigenvalues()(j);
    if (std::abs(lam) >= lambda_cut)
      inv(j) = saddle_free ? 1.0 / std::abs(lam) : 1.0 / lam;
  }
  return es.eigenvectors() * inv.asDiagonal().toDenseMatrix().cast<Cplx>() *
         es.eigenvectors().adjoint();
}

}  // namespace qpd
