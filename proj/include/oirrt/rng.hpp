#pragma once

#include <cstdint>
#include <random>

namespace oirrt {

/// Seeded random stream. Uses the standard-specified Mersenne Twister and
/// hand-rolled conversions so sequences are identical on every platform.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  /// Independent stream for run `index` of a session seeded with `master`.
  static RngStream forRun(std::uint64_t master, std::uint64_t index) {
    return RngStream(splitmix64(master ^ splitmix64(index + 1)));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  static constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

} // namespace oirrt
