#include "ectaks/random.hpp"

#include <cassert>

namespace ectaks {

namespace {

std::mt19937_64 seeded(std::initializer_list<std::uint32_t> words) {
  std::seed_seq seq(words);
  return std::mt19937_64(seq);
}

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seeded({lo32(seed), hi32(seed)})) {}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(seeded({lo32(seed), hi32(seed), lo32(stream), hi32(stream), 0x5eed})) {}

Rng Rng::from_entropy() {
  std::random_device rd;
  const std::uint64_t seed = (std::uint64_t{rd()} << 32) ^ rd();
  return Rng(seed);
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  assert(bound != 0);
  // Largest multiple of bound representable; draws at or above it are rejected.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r > limit);
  return r % bound;
}

std::uint64_t Rng::uniform_in(std::uint64_t lo, std::uint64_t hi) {
  assert(lo <= hi);
  if (lo == 0 && hi == UINT64_MAX) return engine_();
  return lo + uniform(hi - lo + 1);
}

void Rng::fill(std::uint8_t* out, std::size_t len) {
  std::size_t i = 0;
  while (i < len) {
    std::uint64_t w = engine_();
    for (int b = 0; b < 8 && i < len; ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(w);
      w >>= 8;
    }
  }
}

}  // namespace ectaks
