#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace qpd {

// Deterministic RNG with named sub-streams. All randomness in the project
// flows from one root seed; components derive independent streams via
// substream(name, index) so Monte Carlo repetitions, perturbation draws and
// measurement sampling never share state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  Rng substream(std::string_view name, std::uint64_t index = 0) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char c : name) {
      h ^= static_cast<std::uint8_t>(c);
      h *= 1099511628211ull;
    }
    h ^= seed_ + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return Rng(h);
  }

  std::uint64_t seed() const { return seed_; }

  double uniform() {
    // 53-bit mantissa in [0,1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Box-Muller; avoids std::normal_distribution so streams are identical
  // across standard libraries.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // uniform integer in [0, n)
  std::uint64_t integer(std::uint64_t n) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double prob) { return uniform() < prob; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qpd
