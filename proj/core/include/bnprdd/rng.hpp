#pragma once

#include <cstdint>
#include <random>

namespace bnprdd {

/// 64-bit Mersenne Twister stream. Owned by exactly one chain at a time;
/// use split() to derive independent streams for parallel chains.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Raw 64 random bits.
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on [0, n).
  std::uint64_t below(std::uint64_t n);

  /// A new stream whose seed is a splitmix64 hash of (seed, index).
  RandomStream split(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to derive sub-seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace bnprdd
