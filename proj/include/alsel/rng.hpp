// rng.hpp

// Copyright 2026  The alsel Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace alsel {

// SplitMix64 (Steele/Lea/Flood; constants from Vigna's public-domain
// reference). Recurrence, for cross-language reproducibility:
//
//   state += 0x9E3779B97F4A7C15
//   z  = state
//   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
//   z ^= z >> 27;  z *= 0x94D049BB133111EB
//   output = z ^ (z >> 31)
//
// Every random decision in the toolkit flows through this generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound) via the multiply-shift map floor(next()*bound/2^64).
  // bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // Fisher-Yates, back to front.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(next_below(i))]);
    }
  }

 private:
  std::uint64_t state_;
};

// n-th output (0-based) of the stream seeded with `seed`, in O(1): SplitMix64
// advances its state by a fixed increment, so the stream can be indexed.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t n) {
  SplitMix64 g(seed + n * 0x9E3779B97F4A7C15ULL);
  return g.next();
}

// Uniform double in [0, 1) at stream position n; pure in (seed, n), so scores
// drawn this way do not depend on iteration order.
inline double uniform_at(std::uint64_t seed, std::uint64_t n) {
  return static_cast<double>(splitmix64_at(seed, n) >> 11) * 0x1.0p-53;
}

// Independent sub-stream seed: the (salt+1)-th output of the base stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64_at(seed, salt + 1);
}

}  // namespace alsel
