#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

namespace srf {

/// SplitMix64 mixing step. Used to spread a master seed into independent
/// per-trial seeds without correlated low bits.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for sub-stream `index` of a run keyed by `master`. Stable across
/// platforms, so experiment outputs are reproducible byte for byte.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(0x5851f42d4c957f2dULL + index));
}

// Deterministic variate source. std::normal_distribution and friends are
// implementation-defined, so this class generates everything itself from a
// mt19937_64 stream: uniforms by taking the top 53 bits, normals by the
// Box-Muller transform (with the spare cached), bounded integers by
// rejection. Output is identical wherever IEEE doubles and libm agree.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on (0, 1], 53-bit resolution. Never returns 0, so log() below
  /// is safe.
  double uniform01() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal. Consumes two uniforms per generated pair.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform integer in [0, bound), bias-free.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t x = gen_();
      if (x >= threshold) return x % bound;
    }
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace srf
