#pragma once

#include <cstdint>
#include <random>

namespace projlab {

/// 64-bit finalizer from SplitMix64. Bijective, so distinct inputs stay distinct.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combine two 64-bit words into one well-mixed word.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept;

/// A seeded pseudo-random stream. Values are owned by a single task; share
/// seeds, not streams, across threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_pos();
  double normal() { return normal_(engine_); }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  /// +1 or -1 with equal probability.
  double sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

  /// Deterministic child stream keyed by `key`; does not advance this stream.
  RandomStream substream(std::uint64_t key) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Stream for one (cell, replicate) task of an experiment.
RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t cell,
                           std::uint64_t replicate);

/// The seed derive_stream would use, exposed for result tagging.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t cell,
                          std::uint64_t replicate) noexcept;

}  // namespace projlab
