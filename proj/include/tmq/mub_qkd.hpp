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

#ifndef TMQ_MUB_QKD_HPP
#define TMQ_MUB_QKD_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmq/common.hpp"
#include "tmq/rng.hpp"
#include "tmq/tm_states.hpp"

namespace tmq {

/// Bases stored as d x d matrices whose columns are the basis states.
struct MubSet {
    std::size_t dim = 0;
    std::vector<CMatrix> bases;

    std::size_t state_count() const { return dim * bases.size(); }
};

/// Largest deviation from the defining properties: |B^dagger B - 1| within each
/// basis and ||<e_i|f_j>|^2 - 1/d| across bases.
double mub_deviation(const MubSet &set);

/// The first `count` bases of a complete MUB set for d in {2, 3, 4, 5}.
/// d = 2: Z, X, Y eigenbases. Odd prime d: computational basis plus the vectors
/// d^{-1/2} sum_k w^{a k^2 + b k}|k>. d = 4: common eigenbases of the five
/// commuting classes of two-qubit Pauli operators.
MubSet mub_bases(std::size_t d, std::size_t count);

/// Outcome distribution of d - 1 cascaded full-conversion QPGs targeting the
/// basis columns in order; the last entry is the power left unconverted.
std::vector<double> cascade_probabilities(const RegisterState &state, const CMatrix &basis);

/// Samples an outcome of the cascade. Probabilities below 1e-12 are never drawn.
std::size_t bob_cascade_measure(const RegisterState &state, const CMatrix &basis, Rng &rng);

enum class Eavesdropper { none, intercept_resend };

Eavesdropper parse_eavesdropper(std::string_view name);
std::string eavesdropper_name(Eavesdropper e);

struct RoundLog {
    std::size_t alice_basis;
    std::size_t alice_symbol;
    std::optional<std::size_t> eve_basis;
    std::optional<std::size_t> eve_outcome;
    std::size_t bob_basis;
    std::size_t bob_outcome;
};

struct QkdRecord {
    std::size_t dim = 0;
    std::size_t n_bases = 0;
    Eavesdropper eve = Eavesdropper::none;
    std::uint64_t seed = 0;
    std::uint64_t n_rounds = 0;
    std::uint64_t sifted_length = 0;
    std::uint64_t errors = 0;
    double qber = 0.0;
    std::vector<RoundLog> log;
};

/// Prepare-and-measure key distribution with uniformly chosen bases and symbols.
/// Round r draws from the substream ("qkd", r) of `seed`.
QkdRecord bb84_run(std::size_t d, std::uint64_t n_rounds, std::size_t n_bases, Eavesdropper eve,
                   std::uint64_t seed, bool keep_log = false);

/// (1 - 1/M)(d - 1)/d for intercept-resend.
double qber_theory(std::size_t d, std::size_t n_bases, Eavesdropper strategy);

/// Exact sifted error rate summed over every basis, symbol and outcome choice.
double qber_enumerate(std::size_t d, std::size_t n_bases, Eavesdropper strategy);

}  // namespace tmq

#endif  // TMQ_MUB_QKD_HPP
