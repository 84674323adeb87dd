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

#include "tmq/rng.hpp"

#include <stdexcept>

namespace tmq {

namespace {

// FNV-1a; std::hash is not guaranteed stable across standard libraries.
std::uint64_t stable_name_hash(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

Rng make_stream(std::uint64_t master_seed, std::string_view name, std::uint64_t index) {
    const std::uint64_t h = stable_name_hash(name);
    std::seed_seq seq{
        static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
        static_cast<std::uint32_t>(h),           static_cast<std::uint32_t>(h >> 32),
        static_cast<std::uint32_t>(index),       static_cast<std::uint32_t>(index >> 32),
    };
    return Rng(seq);
}

std::size_t sample_index(std::span<const double> weights, Rng &rng, double floor) {
    double total = 0.0;
    for (double w : weights) {
        if (w > floor) {
            total += w;
        }
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("sample_index: all weights are zero");
    }
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] <= floor) {
            continue;
        }
        acc += weights[k];
        last = k;
        if (u < acc) {
            return k;
        }
    }
    return last;
}

}  // namespace tmq
