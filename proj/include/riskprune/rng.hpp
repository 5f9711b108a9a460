#pragma once

#include <cstdint>

namespace riskprune {

// SplitMix64 (Steele/Lea/Flood, public domain reference implementation).
// Fixed-width integer arithmetic only, so sequences are identical on every
// platform.  Independent streams are derived by remixing the seed with the
// stream id; trial t of a simulation uses stream(seed, t).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform on [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform on [-s, s)
  double uniform_signed(double s) { return (2.0 * uniform() - 1.0) * s; }

  // unbiased integer on [0, bound) via rejection
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t reject = (0ULL - bound) % bound;  // 2^64 mod bound
    for (;;) {
      std::uint64_t r = next();
      if (r >= reject) return r % bound;
    }
  }

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t id) {
    SplitMix64 mixer(seed ^ (0xA24BAED4963EE407ULL * (id + 1)));
    return SplitMix64(mixer.next());
  }

 private:
  std::uint64_t state_;
};

}  // namespace riskprune
