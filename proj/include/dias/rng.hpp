#pragma once

#include <cstdint>
#include <random>

namespace dias {

// Stream tags used to derive independent substreams from one master seed.
// Keeping the derivation explicit makes runs reproducible bit-for-bit
// regardless of how many robots/trials consume randomness.
enum class StreamTag : std::uint64_t {
  measurement = 1,
  source_layout = 2,
  initial_positions = 3,
  scratch = 4,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t index = 0) {
  std::uint64_t s = splitmix64(master ^ (static_cast<std::uint64_t>(tag) * 0xD6E8FEB86659FD93ULL));
  return splitmix64(s ^ (index * 0xA0761D6478BD642FULL));
}

/// Seeded random stream with portable uniform/gaussian mappings.
/// std::*_distribution output is implementation-defined, so the mappings
/// are done by hand to keep record streams identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, StreamTag tag, std::uint64_t index = 0)
      : engine_(derive_seed(master, tag, index)) {}

  /// Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double gaussian() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double gaussian(double mean, double std_dev) { return mean + std_dev * gaussian(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dias
