#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace flexpoly {

// Seeded sampler with hand-rolled distributions. The standard distribution
// adaptors are implementation-defined, which would break byte-identical
// regeneration; mt19937_64 itself is pinned by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  int uniform_int(int a, int b) {  // inclusive on both ends
    const std::uint64_t span = static_cast<std::uint64_t>(b - a) + 1;
    return a + static_cast<int>(engine_() % span);
  }

  // On a grid of `step` multiples, endpoints included when they sit on it.
  double uniform_grid(double a, double b, double step) {
    const int n = std::max(0, static_cast<int>(std::floor((b - a) / step + 1e-9)));
    return a + step * uniform_int(0, n);
  }

  double normal(double mean, double stddev) {
    // Box-Muller; one draw consumed per call keeps replay simple.
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586 * u2);
  }

  double lognormal(double mu_log, double sigma_log) { return std::exp(normal(mu_log, sigma_log)); }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace flexpoly
