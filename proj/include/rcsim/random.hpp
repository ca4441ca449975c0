#pragma once

// Seeded random streams. The generator is std::mt19937_64 (a twisted
// generalized feedback shift register whose output sequence is fixed by the
// standard); doubles are built from raw 64-bit draws so results do not depend
// on a library's distribution implementation.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace rcsim {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class StreamPurpose : std::uint64_t {
  InitialState = 1,
  Activation = 2,
  AcquisitionNoise = 3,
  TransmissionNoise = 4,
  Scenario = 5,
};

constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t node, StreamPurpose purpose) {
  return mix64(mix64(mix64(seed) ^ node) ^ static_cast<std::uint64_t>(purpose));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  RandomStream(std::uint64_t seed, std::uint64_t node, StreamPurpose purpose)
      : engine_(substream_seed(seed, node, purpose)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive integer range.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return engine_();
    return lo + engine_() % span;
  }

  // Standard normal via Box-Muller; the second variate is discarded so a
  // stream's state depends only on how many normals were drawn.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rcsim
