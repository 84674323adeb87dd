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

#ifndef TMQ_PDC_MODEL_HPP
#define TMQ_PDC_MODEL_HPP

#include <optional>
#include <vector>

#include "tmq/common.hpp"
#include "tmq/tm_basis.hpp"

namespace tmq {

/// Hermite-Gaussian pump spectrum of order `order`, 1/e intensity width `sigma`,
/// centered at `center` (rad/s).
struct PumpSpec {
    int order = 0;
    double sigma = 1.0;
    double center = 0.0;
};

enum class PhasematchModel { gaussian, sinc };

struct PhasematchSpec {
    PhasematchModel model = PhasematchModel::gaussian;
    double width = 1.0;
    /// Orientation angle in radians of the phasematching ridge; unset means the
    /// group-velocity-matched antidiagonal (pi/4), where the amplitude depends
    /// on w_s - w_i only.
    std::optional<double> angle;
};

/// Two-photon amplitude f(w_s, w_i), rows = signal points, columns = idler points.
/// Normalized so that sum |f|^2 dw_s dw_i = 1.
class JointSpectralAmplitude {
   public:
    JointSpectralAmplitude(FrequencyGrid grid_s, FrequencyGrid grid_i, CMatrix amplitude);

    const FrequencyGrid &grid_s() const { return grid_s_; }
    const FrequencyGrid &grid_i() const { return grid_i_; }
    const CMatrix &amplitude() const { return amplitude_; }
    double norm() const;

    /// Signal and idler exchanged.
    JointSpectralAmplitude transposed() const;

   private:
    FrequencyGrid grid_s_;
    FrequencyGrid grid_i_;
    CMatrix amplitude_;
};

/// Pump envelope alpha(w_s, w_i) ~ HG_n((w_p - w_s - w_i) / sigma).
///
/// The pump ridge, measured along the rotated coordinate (w_s + w_i)/sqrt(2),
/// must fit inside the inscribed half-width of the grid pair; otherwise
/// SupportError.
JointSpectralAmplitude pump_envelope(const PumpSpec &pump, const FrequencyGrid &grid_s, const FrequencyGrid &grid_i);

/// Phasematching phi(w_s, w_i). Offsets are taken from the grid centers; on the
/// antidiagonal orientation the argument is (dw_s - dw_i), otherwise
/// sqrt(2) (dw_s cos a - dw_i sin a). Gaussian: exp(-u^2 / (2 width^2));
/// sinc: sin(u / width) / (u / width).
JointSpectralAmplitude phasematching(const PhasematchSpec &spec, const FrequencyGrid &grid_s,
                                     const FrequencyGrid &grid_i);

/// f = alpha * phi elementwise, renormalized.
JointSpectralAmplitude jsa(const JointSpectralAmplitude &pump, const JointSpectralAmplitude &phasematch);

/// Schmidt-mode width of the matched-Gaussian model (phasematch width = pump sigma).
inline double matched_schmidt_width(double sigma) { return sigma / std::sqrt(2.0); }

struct SchmidtOptions {
    /// Number of mode pairs to keep; unset keeps the fewest pairs whose
    /// lambda sum reaches `cumulative_target` (extended to close a degenerate cluster).
    std::optional<std::size_t> truncation;
    double cumulative_target = 0.9999;
    /// Width of the Hermite-Gaussian reference used to order degenerate modes.
    /// Unset: estimated from the spectral variance of the degenerate cluster.
    std::optional<double> reference_width;
    /// Singular values closer than this are treated as one degenerate cluster.
    double degeneracy_tol = 1e-6;
};

struct SchmidtDecomposition {
    /// sqrt(lambda_k) of the kept pairs, descending.
    RVector weights;
    /// Every singular value of the discretized JSA, descending.
    RVector spectrum;
    std::vector<TemporalMode> signal_modes;
    std::vector<TemporalMode> idler_modes;
    std::size_t truncation = 0;

    ModeBasis signal_basis() const { return ModeBasis(signal_modes); }
    ModeBasis idler_basis() const { return ModeBasis(idler_modes); }
    /// sum_k weight_k f^s_k(w_s) f^i_k(w_i) over the kept pairs.
    CMatrix reconstruct() const;
};

/// SVD of the quadrature-weighted JSA.
///
/// Conventions: weights descending; inside a degenerate cluster the modes are
/// rotated to follow a Hermite-Gaussian reference basis in order of increasing
/// order; each signal mode's largest-magnitude sample is made real positive
/// and the compensating phase is carried by its idler partner.
SchmidtDecomposition schmidt_decompose(const JointSpectralAmplitude &f, const SchmidtOptions &options = {});

/// sqrt(C(n, k) / 2^n), k = 0..n: exact Schmidt weights of the matched-Gaussian
/// JSA pumped with HG_n, via the Hermite addition theorem.
std::vector<double> analytic_weights(int n);

/// sum lambda_k^2 for weights sqrt(lambda_k) (sum lambda_k = 1 within 1e-6).
double purity(std::span<const double> weights);

/// 1 / purity.
double schmidt_number(std::span<const double> weights);

}  // namespace tmq

#endif  // TMQ_PDC_MODEL_HPP
