#ifndef BEAMLOC_RNG_HPP
#define BEAMLOC_RNG_HPP

#include <cstdint>

namespace beamloc {

// SplitMix64 finalizer; used for seeding and stream-key derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna), state seeded through SplitMix64.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += 0x9E3779B97F4A7C15ull;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

// Hierarchical stream key: child(i) derives a statistically independent
// substream, so (master seed, value, trial, location) maps to its own engine.
struct RngStream {
  std::uint64_t key;

  explicit RngStream(std::uint64_t seed) : key(mix64(seed)) {}

  RngStream child(std::uint64_t index) const {
    RngStream s(0);
    s.key = mix64(key ^ (0x9E3779B97F4A7C15ull * (index + 1)));
    return s;
  }

  Xoshiro256pp engine() const { return Xoshiro256pp(key); }
};

// Poisson sampler: sequential inversion below mean 10, Hormann's transformed
// rejection with squeeze (PTRS) above.
long long sample_poisson(Xoshiro256pp& rng, double mean);

// Standard Box-Muller, one normal per pair of uniforms.
double sample_normal(Xoshiro256pp& rng, double stddev);

}  // namespace beamloc

#endif
