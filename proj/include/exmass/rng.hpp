#pragma once

#include <cstdint>
#include <cmath>
#include <array>

namespace exmass::rng {

//! splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Derives the seed of an independent substream (replication b, bootstrap
//! resample i, ...) from a master seed. Fixed function of (seed, index) so
//! parallel schedules cannot change results.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

//! xoshiro256++ generator (Blackman & Vigna). All randomness in the library
//! flows through this generator; Gaussian and Laplace draws are deterministic
//! transforms of its uniforms, so identical seeds give bit-identical samples.
class Xoshiro256pp {
public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    // expand the seed with splitmix64 as recommended by the authors
    std::uint64_t s = seed;
    for (auto& word : state_) {
      word = mix64(s);
      s = word;
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

  //! uniform on [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  //! uniform on (0, 1); never returns an endpoint, safe under log()
  double uniform_open() {
    return static_cast<double>((next() >> 11) | 1ULL) * 0x1.0p-53;
  }

  //! standard normal via Box-Muller (cosine branch); two uniforms per draw
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  //! index uniform on {0, ..., n-1}
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace exmass::rng
