#pragma once

#include <cmath>
#include <cstdint>

namespace collapse {

// Counter-based generator: output k is a pure function of (seed, k), so
// streams can be split per trajectory without coordination and replay is
// exact on any thread schedule. The mixer is the splitmix64 finalizer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : counter_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ULL;
    return mix64(counter_);
  }

  // Uniform on (0, 1]; never returns 0 so log() is safe.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    // Box-Muller; the partner sample is cached, not discarded.
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    cached_ = mag * std::sin(ang);
    has_cached_ = true;
    return mag * std::cos(ang);
  }

  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

 private:
  std::uint64_t counter_;
  std::uint64_t seed_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// Seed for trajectory `index` inside an ensemble rooted at `base_seed`.
// Distinct indices land in well-separated counter streams.
inline std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t index) {
  return CounterRng::mix64(base_seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

}  // namespace collapse
