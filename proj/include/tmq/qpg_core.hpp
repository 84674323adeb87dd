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

#ifndef TMQ_QPG_CORE_HPP
#define TMQ_QPG_CORE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tmq/common.hpp"
#include "tmq/tm_states.hpp"

namespace tmq {

/// A quantum pulse gate programmed to select `target` (a superposition over the
/// register modes) and convert it to the green mode with efficiency sin^2(theta).
struct QpgSpec {
    CVector target;
    double theta = kPi / 2.0;
    /// Per-register-mode rotation angles of an imperfect gate. Length d; the
    /// entry at the target index is ignored. Requires a basis-mode target.
    std::optional<std::vector<double>> residual_thetas;

    static QpgSpec basis_target(std::size_t dim, std::size_t mode, double theta);
    static QpgSpec from_efficiency(CVector target, double efficiency);

    std::size_t dim() const { return static_cast<std::size_t>(target.size()); }
    double efficiency() const { return std::sin(theta) * std::sin(theta); }
    /// Index of the target when it is a single basis mode (up to phase).
    std::optional<std::size_t> basis_index() const;
};

/// Unitary on the register |A_0>..|A_{d-1}> followed by `n_green` green levels.
/// The first green level (index d) is |C>.
class RegisterUnitary {
   public:
    RegisterUnitary(std::size_t dim, CMatrix matrix, std::size_t n_green = 1);

    static RegisterUnitary identity(std::size_t dim, std::size_t n_green = 1);

    std::size_t dim() const { return dim_; }
    std::size_t n_green() const { return n_green_; }
    const CMatrix &matrix() const { return matrix_; }
    /// d x d register block.
    CMatrix register_block() const;

    /// `next` applied after *this.
    RegisterUnitary then(const RegisterUnitary &next) const;
    RegisterState apply(const RegisterState &state) const;

   private:
    std::size_t dim_;
    std::size_t n_green_;
    CMatrix matrix_;
};

/// U = 1 - |t><t| - |C><C| + cos(theta)(|t><t| + |C><C|) + sin(theta)(|C><t| - |t><C|).
///
/// With residual angles each non-target mode j rotates by theta_j into its own
/// auxiliary green level (indices d+1.., in increasing j), so the result stays
/// unitary and has n_green = d.
RegisterUnitary qpg_operator(const QpgSpec &spec);

/// Full conversion Q^(1.0) of the basis mode `mode`.
RegisterUnitary q100(std::size_t dim, std::size_t mode);
/// Q^(0.5) of the basis mode `mode`.
RegisterUnitary q50(std::size_t dim, std::size_t mode);
/// Multiplies |C> by exp(i phi).
RegisterUnitary green_phase(std::size_t dim, double phi);

/// S = sin^4(theta_target) / sum_j sin^2(theta_j). Throws when every angle is zero.
double selectivity(std::span<const double> thetas, std::size_t target);
double selectivity(const QpgSpec &spec);

/// Two cascaded Q^(0.5) gates with exp(i phi) on |C> in between.
RegisterUnitary two_stage(const CVector &target, double phase);

/// Q^(1.0)_b Q^(1.0)_a |psi>; maps |A_a> to -|A_b>. The green slot of the input must be empty.
RegisterState reshape(const RegisterState &state, std::size_t from_mode, std::size_t to_mode);

struct DropSlot {
    std::size_t mode;
    /// Amplitude in the stage's |C> level.
    cplx amplitude;
    /// Power in every green level of the stage (all of them hit the slot detector).
    double power;
};

struct DropResult {
    std::vector<DropSlot> slots;
    /// Register amplitudes left after the last stage.
    CVector residual;
};

/// Demultiplexes a register with a cascade of full-conversion QPGs; stage k
/// targets mode order[k] and its green output is routed to slot k.
/// `residual_thetas` (length d) models crosstalk of every stage.
DropResult drop_cascade(const RegisterState &state, std::span<const std::size_t> order,
                        const std::optional<std::vector<double>> &residual_thetas = std::nullopt);

/// Ideal cascade with superposition targets (e.g. the states of a measurement basis).
DropResult drop_cascade(const RegisterState &state, std::span<const CVector> targets);

/// Moves `green` into the empty mode `target` with a full-conversion QPG
/// (Q^(1.0)|C> = -|A_target>). `register_amps` may be sub-normalized; together
/// with the green amplitude it must have unit norm.
RegisterState add_channel(std::span<const cplx> register_amps, cplx green, std::size_t target);
RegisterState add_channel(const RegisterState &state, std::size_t target);

}  // namespace tmq

#endif  // TMQ_QPG_CORE_HPP
