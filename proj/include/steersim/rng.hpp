#pragma once

#include <cstdint>

namespace steersim {

// splitmix64 (Vigna). 64-bit state, cheap, and identical output on every
// platform, which is what the byte-level reproducibility contract needs.
// All randomness in the simulator flows through instances of this generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53-bit resolution. Explicit construction
  // instead of std::generate_canonical, whose output is not portable.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Two rounds of the splitmix64 output mix. Used to decorrelate derived seeds:
// feeding nearby values straight into SplitMix64 would produce streams that
// are shifted copies of each other.
inline std::uint64_t scramble64(std::uint64_t z) {
  for (int round = 0; round < 2; ++round) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
  }
  return z;
}

// Seed for run r of a batch: base xor a golden-ratio multiple of the index.
inline std::uint64_t run_seed(std::uint64_t base, std::uint64_t run_index) {
  return base ^ (0x9E3779B97F4A7C15ULL * run_index);
}

// Seed for one of a run's substreams (state draw, signal draw, one stream per
// player's action draws). Scrambled so substreams of the same run and equal
// substreams of adjacent runs share no structure.
inline std::uint64_t stream_seed(std::uint64_t run, std::uint64_t stream) {
  return scramble64(run + 0xD1B54A32D192ED03ULL * (stream + 1));
}

}  // namespace steersim
