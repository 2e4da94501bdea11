#pragma once

#include <cstdint>
#include <random>

namespace sra {

/// Seeded 64-bit Mersenne Twister with explicit conversions to uniform and
/// normal variates, so draws are reproducible across standard libraries.
///
/// Substreams: the engine for (seed, stream) is seeded through std::seed_seq
/// with the words {seed & 0xffffffff, seed >> 32, stream}. Distinct stream ids
/// give independent sequences for the same seed.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint32_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace sra
