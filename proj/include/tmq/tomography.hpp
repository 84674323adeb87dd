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

#ifndef TMQ_TOMOGRAPHY_HPP
#define TMQ_TOMOGRAPHY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tmq/common.hpp"
#include "tmq/rng.hpp"
#include "tmq/tm_states.hpp"

namespace tmq {

/// QPG analyzer programmed with zeta f_first + sqrt(1 - zeta^2) e^{i phi} f_second.
///
/// The projected ket is zeta|A_first> + sqrt(1 - zeta^2) e^{-i phi}|A_second>,
/// which makes the converted fraction
///   zeta^2 C_kk + (1 - zeta^2) C_ll + 2 Re[zeta sqrt(1 - zeta^2) e^{i phi} C_lk].
struct AnalyzerSetting {
    double zeta = 1.0;
    double phi = 0.0;
    std::size_t first = 0;
    std::size_t second = 0;
};

/// Analyzer ket in a register of dimension `dim`.
CVector analyzer_vector(const AnalyzerSetting &s, std::size_t dim);

struct RateRecord {
    AnalyzerSetting setting;
    double converted = 0.0;
    double transmitted = 0.0;
    std::optional<std::uint64_t> shots;

    double ratio() const { return converted / (converted + transmitted); }
};

struct CoincidenceRecord {
    AnalyzerSetting a;
    AnalyzerSetting b;
    /// R_{CA,CB}, R_{CA,TB}, R_{TA,CB}, R_{TA,TB}.
    std::array<double, 4> rates{};
    std::optional<std::uint64_t> shots;

    double total() const { return rates[0] + rates[1] + rates[2] + rates[3]; }
    double ratio() const { return rates[0] / total(); }
};

/// Singular or under-determined reconstruction; `indices` names the offending tuple.
struct TomographyError : std::runtime_error {
    TomographyError(const std::string &what, std::vector<std::size_t> idx)
        : std::runtime_error(what), indices(std::move(idx)) {}
    std::vector<std::size_t> indices;
};

/// Converted/transmitted rates for one analyzer setting. Exact probabilities when
/// `shots` is unset (normalized to 1), else a binomial draw of `shots` trials.
RateRecord simulate_single(const DensityMatrix &rho, const AnalyzerSetting &s,
                           std::optional<std::uint64_t> shots = std::nullopt, Rng *rng = nullptr);

/// The single-photon rate formula written out term by term.
double single_rate_formula(const DensityMatrix &rho, const AnalyzerSetting &s);

/// The four coincidence rates, Tr[rho (P_A (x) P_B)] and complements with 1 - P.
/// Sampled mode draws a multinomial over the four detector pairs.
CoincidenceRecord simulate_biphoton(const BipartiteState &rho, const AnalyzerSetting &a, const AnalyzerSetting &b,
                                    std::optional<std::uint64_t> shots = std::nullopt, Rng *rng = nullptr);

/// Coincidence ratio written out term by term, indexed as
/// T_{ijkl} = <A_l B_k|rho|A_i B_j>. With `corrected` the amplitude factor is
/// sqrt(1 - zeta^2) and the mixed term reads T_npqn; without it the factor is
/// sqrt(1 - zeta) and that term reads T_nqqn, which agrees with the operator form
/// only at zeta in {0, 1}.
double expanded_biphoton_ratio(const DensityTensor &c, const AnalyzerSetting &a, const AnalyzerSetting &b,
                              bool corrected);

/// zeta = 1, zeta = 0, and zeta = 1/sqrt(2) at phi = 0 and pi/2 for the pair (k, l).
std::vector<AnalyzerSetting> single_setting_cycle(std::size_t k, std::size_t l);

/// Measurement plan covering every pair of a dim-dimensional register.
std::vector<AnalyzerSetting> single_full_plan(std::size_t dim);

/// All 16 products of the side-A cycle on (m, n) and side-B cycle on (p, q).
std::vector<std::pair<AnalyzerSetting, AnalyzerSetting>> biphoton_setting_cycle(std::size_t m, std::size_t n,
                                                                                std::size_t p, std::size_t q);

struct PartialDensityMatrix {
    CMatrix values;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> known;
    /// Largest |predicted - measured| ratio over the input records.
    double residual = 0.0;
};

struct PartialDensityTensor {
    DensityTensor values;
    std::vector<bool> known;
    double residual = 0.0;

    bool is_known(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;
};

/// Solves the rate equations pairwise; exact at the minimal cycle, least squares
/// with extra settings. Hermiticity is imposed (C_kl = conj(C_lk)).
PartialDensityMatrix reconstruct_single(const std::vector<RateRecord> &records, std::size_t dim);

/// Solves for the Hermitian block of rho on span{A_m, A_n} (x) span{B_p, B_q} for
/// each index tuple present in the records.
PartialDensityTensor reconstruct_biphoton(const std::vector<CoincidenceRecord> &records, std::size_t dim_a,
                                          std::size_t dim_b);

enum class ZeroPolicy { error, maximally_mixed };

struct SanitizeResult {
    DensityMatrix rho;
    /// Frobenius distance between input and output.
    double distance;
};

/// Hermitian part, negative eigenvalues clipped to zero, trace renormalized.
SanitizeResult sanitize(const CMatrix &raw, ZeroPolicy zero_policy = ZeroPolicy::error);

}  // namespace tmq

#endif  // TMQ_TOMOGRAPHY_HPP
