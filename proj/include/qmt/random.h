// Copyright 2026 The qmerkle Authors
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

#ifndef QMT_RANDOM_H
#define QMT_RANDOM_H

#include <cstdint>
#include <random>

namespace qmt {

using Rng = std::mt19937_64;

/// Independent randomness sources derived from one master seed.
enum class Stream : std::uint64_t {
    kOracle = 1,
    kVerifier = 2,
    kStrategy = 3,
    kMeta = 4,
    kPayload = 5,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based seed splitting: the seed for `stream` of trial `index`
/// is splitmix64(splitmix64(master ^ splitmix64(stream)) + index).
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index);

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t index) {
    return Rng(derive_seed(master, stream, index));
}

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace qmt

#endif  // QMT_RANDOM_H
