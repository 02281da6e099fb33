// Copyright 2026 The Blockkit Authors
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

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace blockkit::rng {

using Engine = std::mt19937_64;

// Portable draws built directly on the engine output. std::*_distribution
// is not bit-identical across standard libraries, and frozen golden values
// in the tests depend on these bits.

/// Uniform double in [0, 1), 53 bits of entropy.
inline double uniform01(Engine& g) {
  return static_cast<double>(g() >> 11) * (1.0 / 9007199254740992.0);
}

/// Uniform index in [0, n). Requires n >= 1.
inline std::size_t index(Engine& g, std::size_t n) {
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(g()) * n) >> 64);
}

/// Bernoulli draw with probability p.
inline bool chance(Engine& g, double p) { return uniform01(g) < p; }

/// Uniform double in [lo, hi).
inline double uniform(Engine& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(Engine& g, std::vector<T>& items) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = index(g, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace blockkit::rng
