#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "csense/linalg.hpp"

namespace csense {

// Deterministic pseudo-random stream based on the SplitMix64 update
// (Steele, Lea, Flood 2014). The generator is a pure function of the
// 64-bit state, so identical seeds give identical uint64 streams on
// every platform. Floating-point draws derive from that stream via
// fixed transforms:
//   * uniforms:  (x >> 11) * 2^-53 in [0, 1)
//   * normals:   Box-Muller on the pair (1 - u1, u2)
// Streams are never shared: parallel components derive child seeds
// with derive_seed below.
class RngState {
 public:
  static constexpr const char* kAlgorithm = "splitmix64";

  explicit RngState(std::uint64_t seed) : state_(seed) {}

  std::uint64_t seed() const { return state_; }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by 128-bit multiply-shift
  // (Lemire 2019, unbiased up to 2^-64 which we accept).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::domain_error("RngState: bound must be positive");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // One standard normal via Box-Muller; consumes two uniforms and
  // discards the sine branch. Vector fills use both branches.
  double next_normal() {
    const double u1 = 1.0 - next_unit();  // (0, 1]
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
};

// Child-seed derivation: child = mix(mix(parent) ^ tag), where mix is
// the SplitMix64 finalizer. Distinct tags give decorrelated streams.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return mix(mix(parent) ^ tag);
}

// n i.i.d. standard normals, Box-Muller pairs in stream order.
inline Vector std_normal_vector(RngState& rng, int n) {
  if (n < 1) throw std::domain_error("std_normal_vector: n must be >= 1");
  Vector out(n);
  for (int i = 0; i < n; i += 2) {
    const double u1 = 1.0 - rng.next_unit();
    const double u2 = rng.next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    out[i] = radius * std::cos(2.0 * M_PI * u2);
    if (i + 1 < n) out[i + 1] = radius * std::sin(2.0 * M_PI * u2);
  }
  return out;
}

}  // namespace csense
