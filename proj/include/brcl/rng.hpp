// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Seeded random streams. A stream is identified by (seed, replicate id,
// purpose tag); the three are hashed into the engine seed, so adding or
// reordering replicates never perturbs the draws of an existing one.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace brcl {

enum class StreamPurpose : std::uint64_t {
  kSites = 1,
  kField = 2,
  kPilot = 3,
  kTypicalCell = 4,
  kDesign = 5,
  kMisc = 99,
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replicate, StreamPurpose purpose) {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ replicate);
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

//! Engine used throughout the library.
using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t seed, std::uint64_t replicate, StreamPurpose purpose) {
  return Rng(stream_seed(seed, replicate, purpose));
}

//! Uniform draw on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_exponential(Rng& rng) { return -std::log(uniform_open(rng)); }

//! Box-Muller draw that keeps no spare value, so the stream position depends
//! only on the number of draws taken.
inline double standard_normal(Rng& rng) {
  const double u1 = uniform_open(rng);
  const double u2 = uniform_open(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

}  // namespace brcl
