#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace gendiag {

/// Generator identifier recorded in run metadata. All sampling goes through
/// this wrapper so that runs are bit-reproducible across platforms: the
/// engine is the fully specified std::mt19937_64 and the variate transforms
/// below avoid the implementation-defined std:: distributions.
inline constexpr const char* kRngName = "mt19937_64/boxmuller";

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent substream for one chain of a multi-chain run.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    splitmix64(s);
    s ^= 0xD1B54A32D192ED03ULL * (stream + 1);
    return Rng(splitmix64(s));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1].
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (no cached second variate).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Uniform integer in [0, bound), bound >= 1, without modulo bias.
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  bool bernoulli(double p) { return uniform01() <= p; }

private:
  std::mt19937_64 engine_;
};

}  // namespace gendiag
