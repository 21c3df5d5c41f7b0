#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace stanceval {

// Deterministic 64-bit generator used everywhere a seed appears (subset
// draws, bootstrap resampling, synthetic fixtures). SplitMix64:
//
//   state <- state + 0x9E3779B97F4A7C15   (mod 2^64)
//   z <- state
//   z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z <- (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output z ^ (z >> 31)
//
// Substream k of seed s starts from state mix64(s ^ (k+1)*0x9E3779B97F4A7C15),
// where mix64 is the finalizer above. All arithmetic is unsigned 64-bit, so
// sequences are identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix64(seed ^ ((index + 1) * kGamma)));
  }

  std::uint64_t next() {
    state_ += kGamma;
    return mix64(state_);
  }

  // Unbiased uniform draw in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; two draws per call, no cached state.
  double next_gaussian() {
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
  }

 private:
  std::uint64_t state_;
};

// FNV-1a, 64-bit. Used for token hashing and config/content digests; chosen
// over std::hash because the result must not vary across platforms.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace stanceval
