// Copyright 2026 The Arbound Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace arbound {

using Engine = std::mt19937_64;

// SplitMix64 finalizer (Vigna).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the substream (stream, index) of a base seed. Substreams are
/// keyed by logical index, never by worker identity or execution order, so
/// results do not depend on the thread count.
inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t stream,
                                    std::uint64_t index = 0) {
  std::uint64_t s = splitmix64(base);
  s = splitmix64(s ^ (0xa0761d6478bd642fULL + stream));
  s = splitmix64(s ^ (0xe7037ed1a0b428dbULL + index));
  return s;
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

inline Engine substream_engine(std::uint64_t base, std::uint64_t stream,
                               std::uint64_t index = 0) {
  return Engine(substream_seed(base, stream, index));
}

/// Pairwise tree reduction. The summation order depends only on element
/// order, so per-index parallel producers cannot perturb the total.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace arbound
