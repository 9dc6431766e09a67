#pragma once

#include <cstdint>
#include <random>

namespace ectaks {

// Single-owner randomness source. Seeded construction is reproducible across
// platforms: bounded draws use rejection on the raw mt19937_64 output rather
// than the implementation-defined standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for (seed, index); used for per-trial parallel work.
  Rng(std::uint64_t seed, std::uint64_t stream);

  static Rng from_entropy();

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound);

  // Uniform in [lo, hi].
  std::uint64_t uniform_in(std::uint64_t lo, std::uint64_t hi);

  void fill(std::uint8_t* out, std::size_t len);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ectaks
