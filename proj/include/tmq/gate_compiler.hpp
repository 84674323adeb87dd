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

#ifndef TMQ_GATE_COMPILER_HPP
#define TMQ_GATE_COMPILER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "tmq/common.hpp"
#include "tmq/qpg_core.hpp"

namespace tmq {

enum class PrimitiveKind { q100, q50, green_phase };

/// One QPG-level instruction: a full or half conversion of `target`, or a phase
/// shift of the green mode.
struct Primitive {
    PrimitiveKind kind;
    CVector target;
    double phase = 0.0;

    static Primitive full(CVector target);
    static Primitive half(CVector target);
    /// Phase is wrapped into [0, 2 pi).
    static Primitive phase_shift(double phi);

    RegisterUnitary unitary(std::size_t dim) const;
};

/// Primitives in application order on a d-mode register plus |C>.
struct GateSequence {
    std::size_t dim = 2;
    std::vector<Primitive> primitives;
};

RegisterUnitary evaluate(const GateSequence &seq);

enum class GateName { H, X1, X2, Y1, Y2, Z, phase };

GateName parse_gate_name(std::string_view name);
std::string gate_name(GateName g);

/// QPG recipe for a single-qubit gate on {|A_0>, |A_1>}.
GateSequence compile_gate(GateName gate, double phi = 0.0);

/// The textbook matrix the recipe must reproduce up to a global phase.
CMatrix gate_target(GateName gate, double phi = 0.0);

/// Factorizes a d x d unitary into two-level unitaries on mode pairs by Givens
/// elimination (Reck-style), then realizes each factor through |C>:
///   Q^(1.0)_j, Q^(0.5)_k, green phase, Q^(0.5)_k, Q^(1.0)_j
/// dressed with single-mode phase recipes Q^(1.0)_j, green phase(a + pi), Q^(1.0)_j.
GateSequence compile_qudit_unitary(const CMatrix &u, double tol = 1e-10);

/// max_ij |u_ij - e^{i g} v_ij|, g fixed by the largest-magnitude entry of v.
double phase_distance(const CMatrix &u, const CMatrix &v);
bool equal_up_to_phase(const CMatrix &u, const CMatrix &v, double tol);

/// Largest amplitude that reaches |C> from a register input.
double green_leakage(const RegisterUnitary &u);

struct GateCheck {
    std::string name;
    std::size_t length;
    double distance;
    double leakage;
};

/// Every named gate recipe against its target matrix (phase gate at `phi`).
std::vector<GateCheck> verify_all_gates(double phi = kPi / 3.0);

}  // namespace tmq

#endif  // TMQ_GATE_COMPILER_HPP
