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

#include "tmq/pdc_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace tmq {

JointSpectralAmplitude::JointSpectralAmplitude(FrequencyGrid grid_s, FrequencyGrid grid_i, CMatrix amplitude)
    : grid_s_(grid_s), grid_i_(grid_i), amplitude_(std::move(amplitude)) {
    if (static_cast<std::size_t>(amplitude_.rows()) != grid_s_.n_points() ||
        static_cast<std::size_t>(amplitude_.cols()) != grid_i_.n_points()) {
        throw std::invalid_argument("JSA matrix shape does not match the signal x idler grids");
    }
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("JSA has zero or non-finite norm");
    }
    amplitude_ /= n;
}

double JointSpectralAmplitude::norm() const {
    return std::sqrt(amplitude_.squaredNorm() * grid_s_.step() * grid_i_.step());
}

JointSpectralAmplitude JointSpectralAmplitude::transposed() const {
    return JointSpectralAmplitude(grid_i_, grid_s_, amplitude_.transpose());
}

JointSpectralAmplitude pump_envelope(const PumpSpec &pump, const FrequencyGrid &grid_s, const FrequencyGrid &grid_i) {
    if (!(pump.sigma > 0.0)) {
        throw std::invalid_argument("pump sigma must be positive");
    }
    if (pump.order < 0) {
        throw std::invalid_argument("pump order must be nonnegative");
    }
    const double mismatch = pump.center - grid_s.center() - grid_i.center();
    const double ridge_half = 0.5 * hermite_gaussian_required_span(pump.order, pump.sigma / std::sqrt(2.0));
    const double inscribed = 0.5 * std::min(grid_s.span(), grid_i.span());
    if (std::abs(mismatch) / std::sqrt(2.0) + ridge_half > inscribed * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "pump HG_" << pump.order << " (sigma " << pump.sigma << ") needs an inscribed half-width of "
           << std::abs(mismatch) / std::sqrt(2.0) + ridge_half << " along the rotated axis, grids give " << inscribed;
        throw SupportError(os.str());
    }
    const auto ns = static_cast<Eigen::Index>(grid_s.n_points());
    const auto ni = static_cast<Eigen::Index>(grid_i.n_points());
    CMatrix a(ns, ni);
    for (Eigen::Index r = 0; r < ns; ++r) {
        const double ws = grid_s.point(static_cast<std::size_t>(r));
        for (Eigen::Index c = 0; c < ni; ++c) {
            const double dw = pump.center - ws - grid_i.point(static_cast<std::size_t>(c));
            a(r, c) = hermite_function(pump.order, dw / pump.sigma);
        }
    }
    return JointSpectralAmplitude(grid_s, grid_i, std::move(a));
}

JointSpectralAmplitude phasematching(const PhasematchSpec &spec, const FrequencyGrid &grid_s,
                                     const FrequencyGrid &grid_i) {
    if (!(spec.width > 0.0)) {
        throw std::invalid_argument("phasematching width must be positive");
    }
    const double angle = spec.angle.value_or(kPi / 4.0);
    const double cs = std::sqrt(2.0) * std::cos(angle);
    const double ci = std::sqrt(2.0) * std::sin(angle);
    const auto ns = static_cast<Eigen::Index>(grid_s.n_points());
    const auto ni = static_cast<Eigen::Index>(grid_i.n_points());
    CMatrix a(ns, ni);
    for (Eigen::Index r = 0; r < ns; ++r) {
        const double ds = grid_s.point(static_cast<std::size_t>(r)) - grid_s.center();
        for (Eigen::Index c = 0; c < ni; ++c) {
            const double di = grid_i.point(static_cast<std::size_t>(c)) - grid_i.center();
            // The antidiagonal case is evaluated literally so it depends on ds - di only.
            const double u = spec.angle ? cs * ds - ci * di : ds - di;
            const double x = u / spec.width;
            switch (spec.model) {
                case PhasematchModel::gaussian:
                    a(r, c) = std::exp(-0.5 * x * x);
                    break;
                case PhasematchModel::sinc:
                    a(r, c) = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
                    break;
            }
        }
    }
    return JointSpectralAmplitude(grid_s, grid_i, std::move(a));
}

JointSpectralAmplitude jsa(const JointSpectralAmplitude &pump, const JointSpectralAmplitude &phasematch) {
    if (!(pump.grid_s() == phasematch.grid_s()) || !(pump.grid_i() == phasematch.grid_i())) {
        throw std::invalid_argument("jsa: pump and phasematching live on different grids");
    }
    return JointSpectralAmplitude(pump.grid_s(), pump.grid_i(),
                                  pump.amplitude().cwiseProduct(phasematch.amplitude()));
}

CMatrix SchmidtDecomposition::reconstruct() const {
    const auto ns = signal_modes.empty() ? 0 : signal_modes.front().amplitude().size();
    const auto ni = idler_modes.empty() ? 0 : idler_modes.front().amplitude().size();
    CMatrix f = CMatrix::Zero(ns, ni);
    for (std::size_t k = 0; k < signal_modes.size(); ++k) {
        f += weights[static_cast<Eigen::Index>(k)] * signal_modes[k].amplitude() *
             idler_modes[k].amplitude().transpose();
    }
    return f;
}

namespace {

// Index of the first sample within a relative 1e-6 of the largest magnitude, so
// mirror-symmetric modes pick the same sample regardless of round-off.
Eigen::Index phase_anchor(const CVector &v) {
    const double peak = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= (1.0 - 1e-6) * peak) {
            return i;
        }
    }
    return 0;
}

// Rotates the columns [begin, end) of `u` (orthonormal, Euclidean) so they follow
// projections of a Hermite-Gaussian reference ordered by increasing order.
void order_degenerate_cluster(CMatrix &u, Eigen::Index begin, Eigen::Index end, const FrequencyGrid &grid,
                              std::optional<double> reference_width) {
    const Eigen::Index m = end - begin;
    const CMatrix block = u.middleCols(begin, m);
    const RVector w = grid.points();
    const RVector density = block.cwiseAbs2().rowwise().sum();
    const double mass = density.sum();
    const double mu = density.dot(w) / mass;
    double width = 0.0;
    if (reference_width) {
        width = *reference_width;
    } else {
        const double var = density.dot((w.array() - mu).square().matrix());
        // Cluster of HG orders 0..m-1 has total variance width^2 m^2 / 2.
        width = std::sqrt(2.0 * var / static_cast<double>(m * m));
    }
    const double sqrt_step = std::sqrt(grid.step());
    CMatrix chosen(u.rows(), m);
    Eigen::Index filled = 0;
    const int max_order = static_cast<int>(m) + 40;
    for (int order = 0; order <= max_order && filled < m; ++order) {
        CVector h(u.rows());
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            h[i] = hermite_function(order, (w[i] - mu) / width) / std::sqrt(width) * sqrt_step;
        }
        CVector p = block * (block.adjoint() * h);
        for (Eigen::Index j = 0; j < filled; ++j) {
            p -= chosen.col(j) * chosen.col(j).dot(p);
        }
        const double pn = p.norm();
        if (pn > 1e-3 * h.norm()) {
            chosen.col(filled++) = p / pn;
        }
    }
    // Complete from the original directions if the reference ran out.
    for (Eigen::Index j = 0; j < m && filled < m; ++j) {
        CVector p = block.col(j);
        for (Eigen::Index k = 0; k < filled; ++k) {
            p -= chosen.col(k) * chosen.col(k).dot(p);
        }
        const double pn = p.norm();
        if (pn > 1e-8) {
            chosen.col(filled++) = p / pn;
        }
    }
    u.middleCols(begin, m) = chosen;
}

}  // namespace

SchmidtDecomposition schmidt_decompose(const JointSpectralAmplitude &f, const SchmidtOptions &options) {
    const double ds = f.grid_s().step();
    const double di = f.grid_i().step();
    const CMatrix b = f.amplitude() * std::sqrt(ds * di);
    const auto rank_cap = static_cast<std::size_t>(std::min(b.rows(), b.cols()));
    if (options.truncation && (*options.truncation > rank_cap || *options.truncation == 0)) {
        throw std::invalid_argument("truncation " + std::to_string(*options.truncation) +
                                    " outside 1..min(n_s, n_i) = " + std::to_string(rank_cap));
    }

    Eigen::BDCSVD<CMatrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector s = svd.singularValues();
    CMatrix u = svd.matrixU();
    const CMatrix v = svd.matrixV();
    const auto n = static_cast<Eigen::Index>(s.size());

    std::size_t keep = 0;
    if (options.truncation) {
        keep = *options.truncation;
    } else {
        double acc = 0.0;
        while (keep < rank_cap) {
            acc += s[static_cast<Eigen::Index>(keep)] * s[static_cast<Eigen::Index>(keep)];
            ++keep;
            if (acc >= options.cumulative_target) {
                break;
            }
        }
        while (keep < rank_cap &&
               s[static_cast<Eigen::Index>(keep - 1)] - s[static_cast<Eigen::Index>(keep)] <= options.degeneracy_tol &&
               s[static_cast<Eigen::Index>(keep)] > options.degeneracy_tol) {
            ++keep;
        }
    }

    // Degenerate clusters among the kept modes (clusters are closed to the right).
    const auto kept = static_cast<Eigen::Index>(keep);
    for (Eigen::Index begin = 0; begin < kept;) {
        Eigen::Index end = begin + 1;
        while (end < n && s[end - 1] - s[end] <= options.degeneracy_tol && s[end] > options.degeneracy_tol) {
            ++end;
        }
        if (end - begin > 1) {
            order_degenerate_cluster(u, begin, end, f.grid_s(), options.reference_width);
        }
        begin = end;
    }

    SchmidtDecomposition out;
    out.spectrum = s;
    out.truncation = keep;
    out.weights = s.head(kept);
    out.signal_modes.reserve(keep);
    out.idler_modes.reserve(keep);
    for (Eigen::Index k = 0; k < kept; ++k) {
        CVector us = u.col(k);
        const Eigen::Index anchor = phase_anchor(us);
        const double alpha = std::arg(us[anchor]);
        us *= std::polar(1.0, -alpha);
        CVector wi;
        if (s[k] > 1e-8 * s[0]) {
            wi = b.transpose() * us.conjugate() / s[k];
        } else {
            wi = v.col(k).conjugate() * std::polar(1.0, alpha);
        }
        out.signal_modes.emplace_back(f.grid_s(), us / std::sqrt(ds), "s" + std::to_string(k));
        out.idler_modes.emplace_back(f.grid_i(), wi / std::sqrt(di), "i" + std::to_string(k));
    }
    return out;
}

std::vector<double> analytic_weights(int n) {
    if (n < 0) {
        throw std::invalid_argument("analytic_weights: order must be nonnegative");
    }
    std::vector<double> w(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        w[static_cast<std::size_t>(k)] = std::exp(0.5 * (log_binom - n * std::log(2.0)));
    }
    return w;
}

double purity(std::span<const double> weights) {
    double total = 0.0;
    double p = 0.0;
    for (double w : weights) {
        const double lambda = w * w;
        total += lambda;
        p += lambda * lambda;
    }
    if (weights.empty() || std::abs(total - 1.0) > 1e-6) {
        throw std::invalid_argument("purity: weights are not normalized (sum lambda = " + std::to_string(total) + ")");
    }
    return p;
}

double schmidt_number(std::span<const double> weights) {
    return 1.0 / purity(weights);
}

}  // namespace tmq
