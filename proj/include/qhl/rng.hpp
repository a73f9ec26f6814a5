// Copyright 2026 The QHL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QHL_RNG_HPP
#define QHL_RNG_HPP

#include <cstdint>
#include <random>

namespace qhl {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Stable across platforms and releases.
constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of the `index`-th substream of `base`: splitmix64(splitmix64(base) ^ splitmix64(index + 1)).
/// Used for trial seeds in sweeps and per-particle sampler streams.
constexpr uint64_t derive_seed(uint64_t base, uint64_t index) {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 1));
}

}  // namespace qhl

#endif  // QHL_RNG_HPP
