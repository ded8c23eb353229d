#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mcsa {

// Deterministic seeded generator built on xoshiro256++ with SplitMix64 state
// initialization. stream(id) derives an independent substream from the
// original seed, so adding a channel never perturbs the draws of the channels
// before it. All distributions are implemented here rather than with
// <random> so that identical seeds give bit-identical sequences on every
// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = split_mix(x);
  }

  // Derives a substream keyed by id. Intended for one level of splitting
  // (per-channel streams); nested splits should use distinct id spaces.
  Rng stream(std::uint64_t stream_id) const {
    return Rng(seed_ ^ ((stream_id + 1) * 0x9E3779B97F4A7C15ULL));
  }

  std::uint64_t next_u64() {
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

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller with no cached spare: every call consumes exactly two
  // uniforms, keeping the draw sequence independent of call history.
  double gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log1p(-u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double laplace(double scale) {
    const double u = uniform01() - 0.5;
    const double mag = -std::log1p(-2.0 * std::abs(u));
    return u < 0.0 ? -scale * mag : scale * mag;
  }

  // Inter-arrival time of a Poisson process with the given rate.
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static std::uint64_t split_mix(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t state_[4];
};

}  // namespace mcsa
