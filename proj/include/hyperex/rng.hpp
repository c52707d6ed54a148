#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hyperex {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to decorrelate (seed, stream) pairs.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `stream_id` of a run seeded with `seed`:
/// mix64(seed ^ mix64(stream_id)). Replaying the same pair reproduces the
/// stream bit for bit.
constexpr std::uint64_t stream_seed(std::uint64_t seed,
                                    std::uint64_t stream_id) noexcept {
  return mix64(seed ^ mix64(stream_id));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Rng(stream_seed(seed, stream_id));
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Exponential variate with the given rate (> 0).
inline double exponential(Rng& rng, double rate) {
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform01(rng)) / rate;
}

/// Uniform integer in [0, n), n > 0, by rejection (no modulo bias).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = -n % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= limit) return x % n;
  }
}

inline bool fair_coin(Rng& rng) { return (rng() >> 63) != 0; }

}  // namespace hyperex
