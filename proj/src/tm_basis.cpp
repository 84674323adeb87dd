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

#include "tmq/tm_basis.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include <fftw3.h>

namespace tmq {

FrequencyGrid::FrequencyGrid(double center, double span, std::size_t n_points, Axis axis)
    : center_(center), span_(span), n_points_(n_points), axis_(axis) {
    if (!(span > 0.0) || !std::isfinite(span)) {
        throw std::invalid_argument("grid span must be positive and finite, got " + std::to_string(span));
    }
    if (!std::isfinite(center)) {
        throw std::invalid_argument("grid center must be finite");
    }
    if (n_points < 2) {
        throw std::invalid_argument("too few grid points: need at least 2, got " + std::to_string(n_points));
    }
}

RVector FrequencyGrid::points() const {
    RVector p(static_cast<Eigen::Index>(n_points_));
    for (std::size_t i = 0; i < n_points_; ++i) {
        p[static_cast<Eigen::Index>(i)] = point(i);
    }
    return p;
}

FrequencyGrid make_grid(double center, double span, std::size_t n_points) {
    return FrequencyGrid(center, span, n_points, Axis::frequency);
}

TemporalMode::TemporalMode(FrequencyGrid grid, CVector amplitude, std::string label)
    : grid_(grid), amplitude_(std::move(amplitude)), label_(std::move(label)) {
    if (static_cast<std::size_t>(amplitude_.size()) != grid_.n_points()) {
        throw std::invalid_argument("mode amplitude length " + std::to_string(amplitude_.size()) +
                                    " does not match grid size " + std::to_string(grid_.n_points()));
    }
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("mode amplitude has zero or non-finite norm");
    }
    amplitude_ /= n;
}

double TemporalMode::norm() const {
    return std::sqrt(amplitude_.squaredNorm() * grid_.step());
}

ModeBasis::ModeBasis(std::vector<TemporalMode> modes, ModeFamily family)
    : modes_(std::move(modes)), family_(family) {
    if (modes_.empty()) {
        throw std::invalid_argument("mode basis must contain at least one mode");
    }
    for (const auto &m : modes_) {
        if (!(m.grid() == modes_.front().grid())) {
            throw std::invalid_argument("mode basis members must share one grid");
        }
    }
    const CMatrix g = gram();
    const double err = (g - CMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-6) {
        std::ostringstream os;
        os << "mode basis is not orthonormal: max |<f_j,f_k> - delta_jk| = " << err;
        throw std::invalid_argument(os.str());
    }
}

CMatrix ModeBasis::gram() const {
    const auto n = static_cast<Eigen::Index>(modes_.size());
    CMatrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            g(j, k) = inner_product(modes_[j], modes_[k]);
        }
    }
    return g;
}

double hermite_function(int n, double x) {
    return hermite_functions(n, x).back();
}

std::vector<double> hermite_functions(int n_max, double x) {
    if (n_max < 0) {
        throw std::invalid_argument("Hermite order must be nonnegative");
    }
    std::vector<double> psi(static_cast<std::size_t>(n_max) + 1);
    psi[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
    if (n_max >= 1) {
        psi[1] = std::sqrt(2.0) * x * psi[0];
    }
    for (int k = 1; k < n_max; ++k) {
        psi[k + 1] = std::sqrt(2.0 / (k + 1)) * x * psi[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * psi[k - 1];
    }
    return psi;
}

double hermite_gaussian_required_span(int order, double width) {
    return 8.0 * width + 2.0 * width * std::sqrt(2.0 * order + 1.0);
}

TemporalMode hermite_gaussian(int order, double center, double width, const FrequencyGrid &grid) {
    if (order < 0) {
        throw std::invalid_argument("Hermite-Gaussian order must be nonnegative");
    }
    if (!(width > 0.0)) {
        throw std::invalid_argument("Hermite-Gaussian width must be positive");
    }
    const double half = 0.5 * hermite_gaussian_required_span(order, width);
    const double slack = 1e-12 * grid.span();
    if (center - half < grid.lo() - slack || center + half > grid.hi() + slack) {
        std::ostringstream os;
        os << "grid [" << grid.lo() << ", " << grid.hi() << "] cannot contain HG_" << order
           << " of width " << width << " centered at " << center << " (needs span "
           << 2.0 * half << " around the center)";
        throw SupportError(os.str());
    }
    CVector a(static_cast<Eigen::Index>(grid.n_points()));
    const double scale = 1.0 / std::sqrt(width);
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        const double x = (grid.point(i) - center) / width;
        a[static_cast<Eigen::Index>(i)] = scale * hermite_function(order, x);
    }
    return TemporalMode(grid, std::move(a), "HG" + std::to_string(order));
}

ModeBasis hermite_gaussian_basis(int count, double center, double width, const FrequencyGrid &grid) {
    if (count < 1) {
        throw std::invalid_argument("basis needs at least one mode");
    }
    std::vector<TemporalMode> modes;
    modes.reserve(static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n) {
        modes.push_back(hermite_gaussian(n, center, width, grid));
    }
    return ModeBasis(std::move(modes), ModeFamily::hermite_gaussian);
}

cplx inner_product(const TemporalMode &f, const TemporalMode &g) {
    if (!(f.grid() == g.grid())) {
        throw std::invalid_argument("inner_product: modes live on different grids");
    }
    return f.amplitude().dot(g.amplitude()) * f.grid().step();
}

TemporalMode superpose(std::span<const cplx> coeffs, const ModeBasis &basis, std::string label) {
    if (coeffs.size() != basis.size()) {
        throw std::invalid_argument("superpose: " + std::to_string(coeffs.size()) + " coefficients for " +
                                    std::to_string(basis.size()) + " basis modes");
    }
    double total = 0.0;
    for (const cplx &c : coeffs) {
        total += std::norm(c);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "superpose: coefficients are not normalized (sum |c|^2 = " << total << ")";
        throw std::invalid_argument(os.str());
    }
    CVector a = CVector::Zero(static_cast<Eigen::Index>(basis.grid().n_points()));
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        a += coeffs[j] * basis[j].amplitude();
    }
    return TemporalMode(basis.grid(), std::move(a), std::move(label));
}

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex fftw_plan_mutex;

// y_j = sum_k x_k exp(sign * 2 pi i (k - c)(j - c) / n), c = (n - 1) / 2.
CVector centered_dft(const CVector &x, int sign) {
    const auto n = static_cast<int>(x.size());
    const double c = 0.5 * (n - 1);
    const double two_pi_over_n = 2.0 * kPi / n;
    std::vector<cplx> in(static_cast<std::size_t>(n));
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        in[static_cast<std::size_t>(k)] = x[k] * std::polar(1.0, -sign * two_pi_over_n * c * k);
    }
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_plan_mutex);
        plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex *>(in.data()),
                                reinterpret_cast<fftw_complex *>(out.data()),
                                sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_plan_mutex);
        fftw_destroy_plan(plan);
    }
    CVector y(n);
    const cplx global = std::polar(1.0, sign * two_pi_over_n * c * c);
    for (int j = 0; j < n; ++j) {
        y[j] = global * std::polar(1.0, -sign * two_pi_over_n * c * j) * out[static_cast<std::size_t>(j)];
    }
    return y;
}

}  // namespace

TemporalMode to_time_domain(const TemporalMode &mode) {
    const FrequencyGrid &g = mode.grid();
    if (g.axis() != Axis::frequency) {
        throw std::invalid_argument("to_time_domain: mode is already in the time domain");
    }
    const auto n = g.n_points();
    const double dt = 2.0 * kPi / (static_cast<double>(n) * g.step());
    FrequencyGrid tg(0.0, dt * static_cast<double>(n - 1), n, Axis::time);
    CVector a = centered_dft(mode.amplitude(), +1) * (g.step() / std::sqrt(2.0 * kPi));
    return TemporalMode(tg, std::move(a), mode.label());
}

TemporalMode to_frequency_domain(const TemporalMode &mode, double carrier) {
    const FrequencyGrid &g = mode.grid();
    if (g.axis() != Axis::time) {
        throw std::invalid_argument("to_frequency_domain: mode is already in the frequency domain");
    }
    const auto n = g.n_points();
    const double dw = 2.0 * kPi / (static_cast<double>(n) * g.step());
    FrequencyGrid fg(carrier, dw * static_cast<double>(n - 1), n, Axis::frequency);
    CVector a = centered_dft(mode.amplitude(), -1) * (g.step() / std::sqrt(2.0 * kPi));
    return TemporalMode(fg, std::move(a), mode.label());
}

}  // namespace tmq
