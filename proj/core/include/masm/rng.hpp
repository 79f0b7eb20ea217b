#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace masm {

/// Seeded random stream with a fixed, platform-independent draw sequence.
///
/// All stochastic operations in the library take an explicit stream; there is
/// no global RNG. Parallel Monte Carlo derives one stream per trial from
/// (master seed, grid index, trial index), so results do not depend on how
/// trials are scheduled across workers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix(seed)) {}

  /// Stream keyed by (master, a, b). Same key, same sequence.
  static RngStream derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    s = mix(s + 0x9E3779B97F4A7C15ull * (a + 1));
    s = mix(s + 0x9E3779B97F4A7C15ull * (b + 1));
    return RngStream(s);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1). 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Rejection sampling, no std::distribution
  /// (their draw sequences are implementation-defined).
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0ull - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller. One spare is cached, so draws come in
  /// a fixed sequence regardless of call sites.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Circularly symmetric complex normal with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = s * normal();
    const double im = s * normal();
    return {re, im};
  }

 private:
  // SplitMix64 finalizer, used both for seeding and key mixing.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace masm
