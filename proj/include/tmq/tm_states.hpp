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

#ifndef TMQ_TM_STATES_HPP
#define TMQ_TM_STATES_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tmq/common.hpp"

namespace tmq {

/// Pure single-photon state over |A_0>..|A_{d-1}>, optionally followed by the
/// green mode |C> (index d). Unit norm within 1e-9.
class RegisterState {
   public:
    RegisterState(std::size_t dim, CVector coeffs, bool has_green = false);

    /// |A_k> (with an empty green slot when has_green).
    static RegisterState basis(std::size_t dim, std::size_t k, bool has_green = false);

    std::size_t dim() const { return dim_; }
    bool has_green() const { return has_green_; }
    const CVector &coeffs() const { return coeffs_; }
    /// Register part only (first dim entries).
    CVector register_part() const { return coeffs_.head(static_cast<Eigen::Index>(dim_)); }
    cplx green() const { return has_green_ ? coeffs_[static_cast<Eigen::Index>(dim_)] : cplx{0.0, 0.0}; }
    /// Same state embedded with an (empty) green slot.
    RegisterState with_green() const;

   private:
    std::size_t dim_;
    CVector coeffs_;
    bool has_green_;
};

/// Hermitian (1e-12), unit-trace (1e-9), positive semidefinite (eigenvalues >= -1e-9).
class DensityMatrix {
   public:
    explicit DensityMatrix(CMatrix rho);

    static DensityMatrix pure(const CVector &psi);
    static DensityMatrix maximally_mixed(std::size_t dim);

    std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
    const CMatrix &matrix() const { return rho_; }
    cplx operator()(std::size_t i, std::size_t j) const {
        return rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    RVector eigenvalues() const;

   private:
    CMatrix rho_;
};

/// Four-index density tensor C_ijkl of rho = sum C_ijkl |A_i, B_j><A_k, B_l|.
/// Flat storage follows (i, j, k, l) row-major, which is also the
/// (i d_B + j, k d_B + l) layout of the flattened matrix.
class DensityTensor {
   public:
    DensityTensor(std::size_t dim_a, std::size_t dim_b);
    static DensityTensor from_matrix(std::size_t dim_a, std::size_t dim_b, const CMatrix &rho);

    std::size_t dim_a() const { return dim_a_; }
    std::size_t dim_b() const { return dim_b_; }
    cplx &operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l);
    cplx operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;
    CMatrix to_matrix() const;

   private:
    std::size_t dim_a_;
    std::size_t dim_b_;
    std::vector<cplx> data_;
};

/// Post-selected photon-pair state: pure amplitudes psi_ij over |A_i, B_j>, or a
/// mixed density tensor.
class BipartiteState {
   public:
    static BipartiteState pure(CMatrix coeffs);
    static BipartiteState mixed(DensityTensor tensor);

    std::size_t dim_a() const;
    std::size_t dim_b() const;
    bool is_pure() const { return std::holds_alternative<CMatrix>(data_); }
    /// Pure amplitudes; throws for mixed states.
    const CMatrix &coeffs() const;
    /// Density tensor (computed for pure states).
    DensityTensor tensor() const;
    /// Flattened (d_A d_B) x (d_A d_B) density matrix.
    DensityMatrix density() const;

   private:
    explicit BipartiteState(std::variant<CMatrix, DensityTensor> data) : data_(std::move(data)) {}
    std::variant<CMatrix, DensityTensor> data_;
};

/// sum_k sqrt(lambda_k) |A_k, B_k> for the first `dim` weights (zero-padded if
/// dim exceeds the weight count). Dropping weights requires `renormalize`.
BipartiteState pdc_state(std::span<const double> weights, std::optional<std::size_t> dim = std::nullopt,
                         bool renormalize = false);

/// Heralded state of B when A is detected without mode resolution: Tr_A |psi><psi|.
DensityMatrix herald_unfiltered(const BipartiteState &state);

struct HeraldResult {
    DensityMatrix state;
    double rate;
};

/// Heralding on a QPG that selects |A_target> with conversion efficiency `efficiency`.
/// The B state is <A_target|psi> normalized; the rate is efficiency * ||<A_target|psi>||^2.
HeraldResult herald_qpg(const BipartiteState &state, std::size_t target, double efficiency);

double purity(const DensityMatrix &rho);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma);

/// Hermitian square root of a positive semidefinite matrix (negative round-off clipped).
CMatrix psd_sqrt(const CMatrix &m);

}  // namespace tmq

#endif  // TMQ_TM_STATES_HPP
