#pragma once

#include <cstdint>

// Counter-style deterministic RNG helpers.
//
// Seed derivation for ensembles is fixed once and for all:
//   derive_seed(root, i) = finalize(root XOR (0xD1B54A32D192ED03 * (i + 1)))
// where finalize() is the splitmix64 output mix. Member i of any ensemble
// (sweep rows, probe sets, Monte-Carlo repetitions) uses derive_seed(root, i),
// so runs are reproducible for a given root seed and independent of thread
// scheduling.
//
// White-noise Fourier coefficients are keyed by (seed, k1, k2) only, never by
// the grid size, so the low modes of a coarse grid reappear bit-identically
// inside any finer grid with the same seed.

namespace pcf {

inline constexpr std::uint64_t kSeedStride = 0xD1B54A32D192ED03ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(root ^ (kSeedStride * (index + 1)));
}

// Small sequential generator (splitmix64) for scratch randomness.
struct SplitMix {
  std::uint64_t state;
  explicit SplitMix(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // uniform in (0, 1]: never returns 0, safe for log()
  double uniform_pos() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }
  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace pcf
