#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace qlock {

// Identifies the generator algorithm and substream derivation scheme. Bump
// when either changes; recorded in sidecar files so old runs stay replayable.
inline constexpr const char* kRngVersion = "qlock-prng-v1";

// Deterministic xoshiro256** generator seeded via splitmix64. Avoids
// std::uniform_*_distribution on purpose: those are implementation-defined,
// and reproducibility across platforms is part of the output contract.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_double();

  // Uniform integer in [0, n). n must be positive. Rejection sampling, so the
  // result is exactly uniform.
  uint64_t next_below(uint64_t n);

  // Derives an independent child generator keyed by this generator's seed and
  // the label. Substreams with distinct labels never share state, which lets
  // one master seed drive obfuscation, simulation, and experiment grids
  // without cross-contamination when grid shapes change.
  Rng substream(std::string_view label) const;

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::array<uint64_t, 4> state_;
};

// FNV-1a 64-bit hash, used for substream labels and content hashes.
uint64_t fnv1a64(std::string_view data);

std::string hash_hex(uint64_t value);

}  // namespace qlock
