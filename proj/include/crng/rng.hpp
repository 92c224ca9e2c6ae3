#pragma once

#include <cstdint>
#include <vector>

namespace crng {

// Deterministic xoshiro256** generator seeded through splitmix64.
//
// std::mt19937 + <random> distributions are not reproducible across standard
// library implementations, and experiment outputs must be byte-identical for
// a fixed (config, seed) pair. All randomness in the project flows through
// this generator and the helpers below.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, n) without modulo bias (Lemire's rejection method).
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t threshold = -n % n;
    for (;;) {
      uint64_t r = next_u64();
      __uint128_t m = static_cast<__uint128_t>(r) * n;
      if (static_cast<uint64_t>(m) >= threshold) return static_cast<uint64_t>(m >> 64);
    }
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Independent child stream, stable under the parent's call history.
  // Worker pools hand trial i the generator derived(seed_base, i) so results
  // do not depend on the worker count.
  static Rng derived(uint64_t seed, uint64_t stream) {
    uint64_t x = seed ^ 0x9e3779b97f4a7c15ULL;
    uint64_t mixed = splitmix64(x) ^ (stream * 0xbf58476d1ce4e5b9ULL);
    return Rng(splitmix64(mixed));
  }

  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  uint64_t state_[4];
};

}  // namespace crng
