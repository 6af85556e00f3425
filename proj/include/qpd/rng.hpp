#pragma once
// Deterministic, splittable pseudo-randomness (splitmix64). There is no
// global generator: every consumer owns a SplitMix64, and independent
// streams are derived from (seed, stream index) pairs, so any run is
// reproducible from its 64-bit seed alone.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qpd {

struct SplitMix64 {
  std::uint64_t state = 0;

  SplitMix64() = default;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1]; safe as a log() argument
  double uniform_pos() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  bool coin() { return (next() >> 63) != 0; }

  // standard normal via Box-Muller (two draws per call, no cached state)
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }
};

// A seed for stream number `stream` derived from `seed`; used to give each
// simulation episode its own independent generator.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  g.next();
  return g.next();
}

}  // namespace qpd
