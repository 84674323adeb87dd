// Copyright 2026 The tmq Authors
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

#ifndef TMQ_RNG_HPP
#define TMQ_RNG_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace tmq {

using Rng = std::mt19937_64;

/// Derives an independent generator for (master seed, stream name, index).
///
/// Every random draw in the library goes through a stream obtained here, so a
/// run is reproducible from its master seed and independent work items
/// (rounds, settings, trials) can be evaluated in any order.
Rng make_stream(std::uint64_t master_seed, std::string_view name, std::uint64_t index = 0);

/// Samples an index from nonnegative weights. Weights below `floor` count as
/// zero, so outcomes with round-off probability are never drawn.
std::size_t sample_index(std::span<const double> weights, Rng &rng, double floor = 1e-12);

}  // namespace tmq

#endif  // TMQ_RNG_HPP
