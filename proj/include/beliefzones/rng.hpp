#pragma once
// Deterministic RNG streams shared by the generators, the protocol harness and
// the power iteration. Everything is pinned down to the bit so a run can be
// reproduced from a single 64-bit seed, including from another language:
//
//   splitmix64 step (state s):
//     s += 0x9E3779B97F4A7C15
//     z = s; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//     return z ^ (z >> 31)
//
//   derive_stream(master, k) = the (k+1)-th splitmix64 output for state
//   `master`, i.e. mix(master + (k+1)*0x9E3779B97F4A7C15). Subsystems use
//   fixed stream ids (see kStream* below) so their draws never interleave.
//
//   Rng is xoshiro256++: four state words filled from splitmix64(seed),
//   next() = rotl(s0 + s3, 23) + s0 followed by the standard state update.
//
//   uniform():      top 53 bits, (next() >> 11) * 2^-53, in [0,1)
//   below(n):       (uint64)(uniform() * n), clamped to n-1
//   normal():       Box-Muller, one value per two uniforms, no caching:
//                   u1 = 1 - uniform() in (0,1], u2 = uniform(),
//                   z  = sqrt(-2 ln u1) * cos(2*pi*u2)
//   trunc_normal(mu, sigma): draw mu + sigma*normal() until the value is > 0
//   log_normal(mu, sigma):   exp(mu + sigma*normal())

#include <bit>
#include <cmath>
#include <cstdint>

namespace bz {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// fixed stream ids, offsets passed to derive_stream from a run seed
inline constexpr std::uint64_t kStreamGenerator = 0; // graph generation draws
inline constexpr std::uint64_t kStreamJitter = 1;    // P3 weight jitter
inline constexpr std::uint64_t kStreamShockPick = 2; // P4 shock target sampling

// the power iteration draws from its own fixed seed, independent of any graph
// seed, so contraction estimates do not perturb generator streams
inline constexpr std::uint64_t kPowerIterSeed = 0x504F574552495431ull;

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  std::uint64_t state = 0;
  explicit SplitMix64(std::uint64_t s) : state(s) {}
  std::uint64_t next() {
    state += kGoldenGamma;
    return splitmix64_mix(state);
  }
};

inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t k) {
  return splitmix64_mix(master + (k + 1) * kGoldenGamma);
}

struct Rng {
  std::uint64_t s[4];

  explicit Rng(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (int i = 0; i < 4; ++i) s[i] = sm.next();
  }

  std::uint64_t next() {
    std::uint64_t r = std::rotl(s[0] + s[3], 23) + s[0];
    std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = std::rotl(s[3], 45);
    return r;
  }

  double uniform() { return (double)(next() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n) {
    std::uint64_t v = (std::uint64_t)(uniform() * (double)n);
    return v >= n ? n - 1 : v;
  }

  double normal() {
    double u1 = 1.0 - uniform(); // (0,1], keeps the log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double trunc_normal(double mu, double sigma) {
    for (;;) {
      double w = mu + sigma * normal();
      if (w > 0.0) return w;
    }
  }

  double log_normal(double mu, double sigma) {
    return std::exp(mu + sigma * normal());
  }
};

} // namespace bz
