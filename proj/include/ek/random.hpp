#pragma once

#include <cstdint>

namespace ek {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// SplitMix64 stream keyed by (seed, index): the draws for one work item do
// not depend on how many other items exist or which thread runs them.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t index)
      : state_(splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ull))) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return splitmix64(state_);
  }

  // Uniform integer in [lo, hi] (inclusive), unbiased by rejection.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo;
    if (span == ~0ull) return next();
    const std::uint64_t range = span + 1;
    const std::uint64_t reject_from = ~0ull - (~0ull % range);
    std::uint64_t r;
    do r = next();
    while (r >= reject_from);
    return lo + r % range;
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Either exhaustive enumeration of a block or `count` uniform draws with
// replacement keyed by `seed`.
struct SampleMode {
  enum class Kind { full, sampled };
  Kind kind = Kind::full;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;

  static SampleMode full() { return {}; }
  static SampleMode sampled(std::uint64_t count, std::uint64_t seed) {
    return {Kind::sampled, count, seed};
  }
  bool is_full() const { return kind == Kind::full; }
};

}  // namespace ek
