#pragma once

#include <complex>
#include <cstdint>
#include <cmath>
#include <random>

namespace malab {

/// mt19937_64 with the uniform map spelled out, so draws do not depend on
/// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer in [lo, hi].
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double log_uniform(double lo, double hi) {
    return lo * std::pow(hi / lo, uniform());
  }
  std::complex<double> complex(double scale) {
    const double re = uniform(-scale, scale);
    return {re, uniform(-scale, scale)};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace malab
