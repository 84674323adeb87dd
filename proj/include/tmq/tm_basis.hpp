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

#ifndef TMQ_TM_BASIS_HPP
#define TMQ_TM_BASIS_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmq/common.hpp"

namespace tmq {

/// Raised when a grid is too small to hold a mode's support.
struct SupportError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Axis { frequency, time };

/// Uniform sampling of an interval. Frequencies are angular (rad/s), times in s.
///
/// Point i sits at center - span/2 + i*step, so the grid is fully determined by
/// (center, span, n_points, axis). Quadrature weight of every point is `step`.
class FrequencyGrid {
   public:
    FrequencyGrid(double center, double span, std::size_t n_points, Axis axis = Axis::frequency);

    double center() const { return center_; }
    double span() const { return span_; }
    std::size_t n_points() const { return n_points_; }
    double step() const { return span_ / static_cast<double>(n_points_ - 1); }
    Axis axis() const { return axis_; }
    double lo() const { return center_ - 0.5 * span_; }
    double hi() const { return center_ + 0.5 * span_; }
    double point(std::size_t i) const { return lo() + static_cast<double>(i) * step(); }
    RVector points() const;

    bool operator==(const FrequencyGrid &) const = default;

   private:
    double center_;
    double span_;
    std::size_t n_points_;
    Axis axis_;
};

FrequencyGrid make_grid(double center, double span, std::size_t n_points);

/// Complex amplitude on a grid with unit Riemann-sum norm sum |a_i|^2 * step = 1.
class TemporalMode {
   public:
    /// Normalizes `amplitude`; throws if it has zero norm or the wrong length.
    TemporalMode(FrequencyGrid grid, CVector amplitude, std::string label = {});

    const FrequencyGrid &grid() const { return grid_; }
    const CVector &amplitude() const { return amplitude_; }
    const std::string &label() const { return label_; }
    double norm() const;

   private:
    FrequencyGrid grid_;
    CVector amplitude_;
    std::string label_;
};

enum class ModeFamily { hermite_gaussian, custom };

/// Orthonormal (within 1e-6) ordered family of modes on one grid.
class ModeBasis {
   public:
    ModeBasis(std::vector<TemporalMode> modes, ModeFamily family = ModeFamily::custom);

    std::size_t size() const { return modes_.size(); }
    const TemporalMode &operator[](std::size_t k) const { return modes_[k]; }
    const std::vector<TemporalMode> &modes() const { return modes_; }
    ModeFamily family() const { return family_; }
    const FrequencyGrid &grid() const { return modes_.front().grid(); }

    /// Gram matrix of quadrature inner products.
    CMatrix gram() const;

   private:
    std::vector<TemporalMode> modes_;
    ModeFamily family_;
};

/// Normalized Hermite function psi_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi)),
/// evaluated by the three-term recurrence (no factorial overflow).
double hermite_function(int n, double x);

/// All of psi_0..psi_{n_max} at x.
std::vector<double> hermite_functions(int n_max, double x);

/// Smallest grid span that holds HG_n of width sigma: classical turning points
/// plus 4 sigma tails on each side.
double hermite_gaussian_required_span(int order, double width);

/// HG_n(w) ~ H_n((w - center)/width) exp(-(w - center)^2 / (2 width^2)) / sqrt(n! sqrt(pi) 2^n width).
///
/// Throws SupportError when the window of hermite_gaussian_required_span does
/// not fit inside the grid.
TemporalMode hermite_gaussian(int order, double center, double width, const FrequencyGrid &grid);

/// HG_0..HG_{count-1} as a basis.
ModeBasis hermite_gaussian_basis(int count, double center, double width, const FrequencyGrid &grid);

/// <f, g> = sum conj(f_i) g_i * step. The 1/(2 pi) of the continuous frequency
/// integral is absorbed into the mode normalization, so normalized modes give 1.
cplx inner_product(const TemporalMode &f, const TemporalMode &g);

/// sum_j c_j f_j. Coefficients must satisfy sum |c_j|^2 = 1 within 1e-9.
TemporalMode superpose(std::span<const cplx> coeffs, const ModeBasis &basis, std::string label = {});

/// Fourier transform to the envelope time domain (carrier at the grid center removed):
///   f(t) = (2 pi)^{-1/2} sum_k f(w_k) exp(+i (w_k - w_c) t) dw
/// on the reciprocal grid with dt = 2 pi / (n dw), centered at t = 0.
/// The discrete map is unitary, so norms and inner products are preserved exactly.
TemporalMode to_time_domain(const TemporalMode &mode);

/// Inverse of to_time_domain; `carrier` is the frequency grid center to restore.
TemporalMode to_frequency_domain(const TemporalMode &mode, double carrier);

}  // namespace tmq

#endif  // TMQ_TM_BASIS_HPP
