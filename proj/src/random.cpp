#include "projlab/random.hpp"

namespace projlab {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
  return mix64(seed ^ mix64(value + 0x632be59bd9b4e019ULL));
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_pos() {
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t RandomStream::index(std::uint64_t n) {
  // Lemire-style rejection keeps the draw unbiased for every n.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % n;
  }
}

RandomStream RandomStream::substream(std::uint64_t key) const {
  return RandomStream(hash_combine(seed_, key));
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t cell,
                          std::uint64_t replicate) noexcept {
  return hash_combine(hash_combine(mix64(master_seed), cell), replicate);
}

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t cell,
                           std::uint64_t replicate) {
  return RandomStream(derive_seed(master_seed, cell, replicate));
}

}  // namespace projlab
