#pragma once

#include <cstdint>
#include <random>

namespace oqb {

// Deterministic per-realization random stream: stream i of a master seed is
// mt19937_64 seeded with the i-th SplitMix64 output of the master seed, so
// (master_seed, index) -> sequence is reproducible across platforms.
class rng_stream {
 public:
  rng_stream(std::uint64_t master_seed, std::uint64_t index)
      : engine_(derive_seed(master_seed, index)) {}

  // uniform in [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t raw() { return engine_(); }

  static std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t z = master_seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace oqb
