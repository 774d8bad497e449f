#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace gradmix {

// Seed derivation used everywhere randomness is consumed. Substreams are
// keyed by content (function name hash, scheme id, bucket, trial, ...)
// rather than by execution order, so permuting the work schedule never
// changes a draw.
//
// mix64 is the splitmix64 finalizer; combine absorbs one word per step:
//   acc <- mix64(acc + 0x9E3779B97F4A7C15 + part)

inline constexpr std::uint64_t kSeedGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t combine_seed(std::uint64_t acc, std::uint64_t part) {
  return mix64(acc + kSeedGolden + part);
}

inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t acc = mix64(base + kSeedGolden);
  for (std::uint64_t p : parts) acc = combine_seed(acc, p);
  return acc;
}

// FNV-1a, used to key substreams by objective name.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Standard-normal stream: mt19937_64 (bit-reproducible per the standard)
// plus an explicit Box-Muller transform, so draws do not depend on the
// standard library's unspecified distribution internals.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  // uniform in [0, 1), 53-bit mantissa
  double next_uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  void fill(std::span<double> out) {
    for (double& v : out) v = next();
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gradmix
