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

#ifndef TMQ_FUSION_CLUSTER_HPP
#define TMQ_FUSION_CLUSTER_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmq/common.hpp"
#include "tmq/gate_compiler.hpp"
#include "tmq/rng.hpp"

namespace tmq {

/// n TM qubits over {|A_0>, |A_1>}; slot 0 is the most significant bit of the index.
class MultiQubitState {
   public:
    MultiQubitState(std::size_t n, CVector coeffs);

    static MultiQubitState product(const std::vector<CVector> &qubits);

    std::size_t n() const { return n_; }
    const CVector &coeffs() const { return coeffs_; }

   private:
    std::size_t n_;
    CVector coeffs_;
};

/// 2 x 2 `u` on `slot`.
MultiQubitState apply_local(const MultiQubitState &s, std::size_t slot, const CMatrix &u);
/// Register block of a compiled QPG program on `slot`.
MultiQubitState apply_compiled(const MultiQubitState &s, std::size_t slot, const GateSequence &seq);

/// Projects `slot` on |outcome> and removes it (the slot factors out after projection).
/// Returns the outcome and the normalized remainder.
std::pair<int, MultiQubitState> measure_z(const MultiQubitState &s, std::size_t slot, Rng &rng);

/// O_{1,2} = (|0>_b <0|_a <0|_b -/+ |1>_b <1|_a <1|_b)/sqrt(2) as 2 x 4 matrices on |a b>.
std::pair<CMatrix, CMatrix> fusion_kraus();

enum class Detector { d1, d2, failure };
std::string detector_name(Detector d);

struct FusionOutcome {
    Detector detector;
    /// n - 1 qubits on success (fused qubit in slot b's place, slot a removed);
    /// the normalized odd-parity projection on all n qubits on failure. Unset for
    /// outcomes of probability zero.
    std::optional<MultiQubitState> post_state;
    double probability;
};

/// Exact distribution over {D1, D2, failure}.
std::array<FusionOutcome, 3> apply_fusion(const MultiQubitState &s, std::size_t slot_a, std::size_t slot_b);
/// One sampled outcome.
FusionOutcome apply_fusion(const MultiQubitState &s, std::size_t slot_a, std::size_t slot_b, Rng &rng);

enum class FailurePolicy {
    /// A failed fusion Z-measures the chain end; the chain loses one qubit.
    truncate,
    /// A failed fusion costs only the Bell pair; the chain is kept.
    keep_chain
};

FailurePolicy parse_failure_policy(std::string_view name);
std::string failure_policy_name(FailurePolicy p);

/// The PDC TM Bell pair (|01> + |10>)/sqrt(2).
MultiQubitState bell_pair();

/// Bell pair brought to the two-qubit cluster (|0+> + |1->)/sqrt(2) with compiled X and H.
MultiQubitState cluster_pair();

struct ResourceReport {
    std::uint64_t pairs_consumed = 0;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
    std::uint64_t failures = 0;
};

struct ClusterGrowth {
    MultiQubitState state;
    ResourceReport report;
};

/// Grows a linear cluster of `target_n` qubits from Bell pairs, fusing the chain
/// end with each new pair until the target length is reached. `bell_supply`
/// bounds the number of pairs; exceeding it throws.
ClusterGrowth grow_linear_cluster(std::size_t target_n, std::optional<std::uint64_t> bell_supply, Rng &rng,
                                  FailurePolicy policy = FailurePolicy::truncate);

struct ClusterReport {
    /// <X_i prod_{j in nbr(i)} Z_j> for each chain position.
    std::vector<double> stabilizers;
    bool pass;
};

ClusterReport verify_cluster(const MultiQubitState &s, std::size_t chain_length);

/// Ideal linear cluster prod CZ |+>^n.
MultiQubitState linear_cluster(std::size_t n);

}  // namespace tmq

#endif  // TMQ_FUSION_CLUSTER_HPP
