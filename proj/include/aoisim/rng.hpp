#pragma once

#include <cstdint>

namespace aoisim {

// splitmix64 finalizer; bijective on 64-bit words with strong avalanche.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based random stream.  Each draw is a pure function of
// (seed, stream id, counter), so a run's draws are reproducible and any two
// streams can be consumed in any interleaving without affecting each other.
// The simulator gives every terminal its own stream plus one to the
// scheduler; runs sharing a seed therefore see identical arrival sequences
// no matter which policy (or reference dynamics) consumes scheduler draws.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed ^ mix64(0xd1342543de82ef95ULL * (stream + 1)))) {}

  std::uint64_t next_u64() {
    counter_ += 1;
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * counter_);
  }

  // uniform double in [0, 1), 53 random bits
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  // unbiased uniform integer in [0, n); n >= 1
  std::uint32_t below(std::uint32_t n) {
    const std::uint64_t span = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t v = next_u64();
    while (v >= span) v = next_u64();
    return static_cast<std::uint32_t>(v % n);
  }

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace aoisim
