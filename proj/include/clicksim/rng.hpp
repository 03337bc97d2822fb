#pragma once

#include <cstdint>

namespace clicksim {

// SplitMix64 generator.  `for_stream(seed, i)` derives an independent stream
// for index i by scrambling (seed, i) through the same finalizer, which is
// what makes Monte Carlo runs bitwise reproducible no matter how trials are
// scheduled across workers: trial i always consumes exactly its own stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace clicksim
