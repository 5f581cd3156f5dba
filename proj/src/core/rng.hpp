#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gwfit {

// SplitMix64 finalizer over a counter. Draw i of stream s from seed k is a
// pure function of (k, s, i), so replicate-level parallelism cannot change
// the sampled values.
inline uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream = 0)
      : key_(mix64(seed + 0x9E3779B97F4A7C15ull * (stream + 1))) {}

  // uniform on (0, 1)
  double uniform01(uint64_t i) const {
    const uint64_t z = mix64(key_ + 0x9E3779B97F4A7C15ull * (i + 1));
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
  }

  // uniform on [-1, 1]
  double uniform_sym(uint64_t i) const { return 2.0 * uniform01(i) - 1.0; }

  // standard normal via Box-Muller; consumes counter slots 2i and 2i+1
  double normal(uint64_t i) const {
    const double u1 = uniform01(2 * i);
    const double u2 = uniform01(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  uint64_t key_;
};

}  // namespace gwfit
