// Deterministic random streams. All randomness in the library flows through
// Rng so that a fixed seed reproduces bit-identical output; the gaussian is
// hand-rolled Box-Muller because std::normal_distribution is
// implementation-defined.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace bimatrix {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on [0,1) with 53 random bits
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  std::complex<double> complex_gaussian() {
    return {gaussian() * M_SQRT1_2, gaussian() * M_SQRT1_2};
  }

  std::uint64_t bits() { return gen_(); }

  // integer in [0, n)
  int index(int n) { return static_cast<int>(uniform() * n) % n; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace bimatrix
