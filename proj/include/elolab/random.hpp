#pragma once

// Portable random draws.
//
// std::mt19937_64 is bit-exact across standard libraries, but the std
// distribution classes are not. Every draw used by the simulation goes
// through the routines below so that a seed reproduces the same schedules,
// skills and outcomes on any platform:
//
//   uniform01    53 high bits of one engine output, scaled to [0, 1)
//   uniform_index  rejection sampling on the top bits (no modulo bias)
//   normal       Marsaglia polar method, caching the second deviate
//   shuffle      Fisher-Yates, walking from the back
//
// Independent streams are derived with SplitMix64 over (seed, stream).

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace elolab {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of stream `stream` derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    int bits = 0;
    while ((std::uint64_t{1} << bits) < n && bits < 63) ++bits;
    if ((std::uint64_t{1} << bits) < n) bits = 64;
    for (;;) {
      const std::uint64_t candidate =
          bits == 64 ? engine_() : engine_() >> (64 - bits);
      if (candidate < n) return candidate;
    }
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace elolab
