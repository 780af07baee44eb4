#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace wiener {

/// Generator used for every stream in the engine. The variate transforms
/// below are written out explicitly (instead of std::*_distribution) so
/// sample sequences are identical across standard library implementations.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Independent stream for (master seed, stream index), e.g. one per worker.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
  const std::uint64_t a = splitmix64(master_seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream_index + 0x632be59bd9b4e019ull));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform on (0, 1].
inline double uniform_open0(Rng& rng) { return 1.0 - uniform01(rng); }

/// Standard normal variate by Box-Muller (no cached second variate, so the
/// stream position depends only on the number of calls).
inline double standard_normal(Rng& rng) {
  const double u1 = uniform_open0(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace wiener
