#pragma once

#include <cstdint>
#include <random>

namespace strikesim {

/// SplitMix64 finalizer. Only used to derive well-separated seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// A seeded random stream. Every draw the simulation makes goes through one
/// of these, so a (root seed, tick, phase) triple pins the whole sequence.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  /// Substream for one phase of one tick.
  static Stream derive(std::uint64_t root, std::uint64_t tick, std::uint64_t phase) {
    std::uint64_t h = mix64(root);
    h = mix64(h ^ tick);
    h = mix64(h ^ (phase + 0x5851F42D4C957F2DULL));
    return Stream(h);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be nonzero.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = -n % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= limit) return x % n;
    }
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace strikesim
