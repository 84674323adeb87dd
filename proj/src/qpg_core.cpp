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

#include "tmq/qpg_core.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tmq {

namespace {

void check_theta(double theta, const char *what) {
    if (!(theta >= -1e-15 && theta <= kPi / 2.0 + 1e-15)) {
        std::ostringstream os;
        os << what << " " << theta << " outside [0, pi/2]";
        throw std::invalid_argument(os.str());
    }
}

void check_target(const CVector &target) {
    if (target.size() == 0) {
        throw std::invalid_argument("QPG target must have at least one mode");
    }
    const double n2 = target.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "QPG target is not normalized (norm^2 = " << n2 << ")";
        throw std::invalid_argument(os.str());
    }
}

CVector unit(std::size_t dim, std::size_t k) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(k)] = 1.0;
    return v;
}

}  // namespace

QpgSpec QpgSpec::basis_target(std::size_t dim, std::size_t mode, double theta) {
    if (mode >= dim) {
        throw std::out_of_range("QPG target mode " + std::to_string(mode) + " out of range for d = " +
                                std::to_string(dim));
    }
    return QpgSpec{unit(dim, mode), theta, std::nullopt};
}

QpgSpec QpgSpec::from_efficiency(CVector target, double efficiency) {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
        throw std::invalid_argument("QPG efficiency must lie in [0, 1]");
    }
    return QpgSpec{std::move(target), std::asin(std::sqrt(efficiency)), std::nullopt};
}

std::optional<std::size_t> QpgSpec::basis_index() const {
    for (Eigen::Index k = 0; k < target.size(); ++k) {
        if (std::abs(std::abs(target[k]) - 1.0) <= 1e-12) {
            return static_cast<std::size_t>(k);
        }
    }
    return std::nullopt;
}

RegisterUnitary::RegisterUnitary(std::size_t dim, CMatrix matrix, std::size_t n_green)
    : dim_(dim), n_green_(n_green), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(dim_ + n_green_);
    if (dim_ == 0 || matrix_.rows() != n || matrix_.cols() != n) {
        throw std::invalid_argument("register unitary must be (d + n_green) square");
    }
    const double r = unitarity_residual(matrix_);
    if (r > 1e-12) {
        std::ostringstream os;
        os << "matrix is not unitary (max |U^dagger U - 1| = " << r << ")";
        throw std::invalid_argument(os.str());
    }
}

RegisterUnitary RegisterUnitary::identity(std::size_t dim, std::size_t n_green) {
    const auto n = static_cast<Eigen::Index>(dim + n_green);
    return RegisterUnitary(dim, CMatrix::Identity(n, n), n_green);
}

CMatrix RegisterUnitary::register_block() const {
    const auto d = static_cast<Eigen::Index>(dim_);
    return matrix_.topLeftCorner(d, d);
}

RegisterUnitary RegisterUnitary::then(const RegisterUnitary &next) const {
    if (next.dim_ != dim_ || next.n_green_ != n_green_) {
        throw std::invalid_argument("cannot compose register unitaries of different shapes");
    }
    return RegisterUnitary(dim_, next.matrix_ * matrix_, n_green_);
}

RegisterState RegisterUnitary::apply(const RegisterState &state) const {
    if (state.dim() != dim_) {
        throw std::invalid_argument("state dimension does not match the unitary");
    }
    CVector in = CVector::Zero(matrix_.rows());
    in.head(state.coeffs().size()) = state.coeffs();
    const CVector out = matrix_ * in;
    if (n_green_ == 1) {
        return RegisterState(dim_, out, true);
    }
    // RegisterState has a single green slot; auxiliary levels must stay empty.
    const double aux = out.tail(static_cast<Eigen::Index>(n_green_ - 1)).squaredNorm();
    if (aux > 1e-24) {
        throw std::invalid_argument("apply: output populates auxiliary green levels; use the full matrix");
    }
    return RegisterState(dim_, out.head(static_cast<Eigen::Index>(dim_ + 1)), true);
}

RegisterUnitary qpg_operator(const QpgSpec &spec) {
    check_target(spec.target);
    check_theta(spec.theta, "QPG theta");
    const std::size_t d = spec.dim();
    const auto dd = static_cast<Eigen::Index>(d);
    const double c = std::cos(spec.theta);
    const double s = std::sin(spec.theta);

    if (!spec.residual_thetas) {
        const auto n = dd + 1;
        CVector t = CVector::Zero(n);
        t.head(dd) = spec.target;
        CVector green = CVector::Zero(n);
        green[dd] = 1.0;
        const CMatrix pt = t * t.adjoint();
        const CMatrix pc = green * green.adjoint();
        CMatrix u = CMatrix::Identity(n, n) - pt - pc + c * (pt + pc) + s * (green * t.adjoint() - t * green.adjoint());
        return RegisterUnitary(d, std::move(u), 1);
    }

    const auto &res = *spec.residual_thetas;
    if (res.size() != d) {
        throw std::invalid_argument("residual_thetas must have one angle per register mode (" + std::to_string(d) + ")");
    }
    const auto target_index = spec.basis_index();
    if (!target_index) {
        throw std::invalid_argument("residual_thetas require a single basis-mode target");
    }
    const auto ti = static_cast<Eigen::Index>(*target_index);
    const cplx ph = spec.target[ti];
    const auto n = 2 * dd;
    CMatrix u = CMatrix::Identity(n, n);
    // Target rotation between ph|A_i> and |C>.
    u(ti, ti) = c;
    u(dd, dd) = c;
    u(dd, ti) = s * std::conj(ph);
    u(ti, dd) = -s * ph;
    Eigen::Index aux = dd + 1;
    for (Eigen::Index j = 0; j < dd; ++j) {
        if (j == ti) {
            continue;
        }
        const double tj = res[static_cast<std::size_t>(j)];
        check_theta(tj, "residual theta");
        u(j, j) = std::cos(tj);
        u(aux, aux) = std::cos(tj);
        u(aux, j) = std::sin(tj);
        u(j, aux) = -std::sin(tj);
        ++aux;
    }
    return RegisterUnitary(d, std::move(u), d);
}

RegisterUnitary q100(std::size_t dim, std::size_t mode) {
    return qpg_operator(QpgSpec::basis_target(dim, mode, kPi / 2.0));
}

RegisterUnitary q50(std::size_t dim, std::size_t mode) {
    return qpg_operator(QpgSpec::basis_target(dim, mode, kPi / 4.0));
}

RegisterUnitary green_phase(std::size_t dim, double phi) {
    const auto n = static_cast<Eigen::Index>(dim + 1);
    CMatrix u = CMatrix::Identity(n, n);
    u(n - 1, n - 1) = std::polar(1.0, phi);
    return RegisterUnitary(dim, std::move(u), 1);
}

double selectivity(std::span<const double> thetas, std::size_t target) {
    if (target >= thetas.size()) {
        throw std::out_of_range("selectivity: target index out of range");
    }
    double total = 0.0;
    for (double t : thetas) {
        total += std::sin(t) * std::sin(t);
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("selectivity undefined: all conversion angles are zero");
    }
    const double st = std::sin(thetas[target]) * std::sin(thetas[target]);
    return st * st / total;
}

double selectivity(const QpgSpec &spec) {
    const auto idx = spec.basis_index();
    if (!idx) {
        throw std::invalid_argument("selectivity needs a basis-mode target");
    }
    std::vector<double> thetas = spec.residual_thetas.value_or(std::vector<double>(spec.dim(), 0.0));
    thetas[*idx] = spec.theta;
    return selectivity(thetas, *idx);
}

RegisterUnitary two_stage(const CVector &target, double phase) {
    const RegisterUnitary half = qpg_operator(QpgSpec{target, kPi / 4.0, std::nullopt});
    return half.then(green_phase(static_cast<std::size_t>(target.size()), phase)).then(half);
}

RegisterState reshape(const RegisterState &state, std::size_t from_mode, std::size_t to_mode) {
    if (std::abs(state.green()) > 1e-12) {
        throw std::invalid_argument("reshape: the green channel must be empty before reshaping");
    }
    const std::size_t d = state.dim();
    return q100(d, from_mode).then(q100(d, to_mode)).apply(state.with_green());
}

namespace {

DropResult run_cascade(const RegisterState &state, const std::vector<RegisterUnitary> &stages,
                       const std::vector<std::size_t> &modes) {
    if (std::abs(state.green()) > 1e-12) {
        throw std::invalid_argument("drop_cascade: the green channel must be empty on input");
    }
    const auto d = static_cast<Eigen::Index>(state.dim());
    CVector reg = state.register_part();
    DropResult out;
    for (std::size_t k = 0; k < stages.size(); ++k) {
        const CMatrix &u = stages[k].matrix();
        CVector in = CVector::Zero(u.rows());
        in.head(d) = reg;
        const CVector o = u * in;
        out.slots.push_back(DropSlot{modes[k], o[d], o.tail(u.rows() - d).squaredNorm()});
        reg = o.head(d);
    }
    out.residual = reg;
    return out;
}

}  // namespace

DropResult drop_cascade(const RegisterState &state, std::span<const std::size_t> order,
                        const std::optional<std::vector<double>> &residual_thetas) {
    const std::size_t d = state.dim();
    std::set<std::size_t> seen;
    std::vector<RegisterUnitary> stages;
    std::vector<std::size_t> modes;
    for (std::size_t m : order) {
        if (m >= d) {
            throw std::out_of_range("drop_cascade: mode " + std::to_string(m) + " out of range");
        }
        if (!seen.insert(m).second) {
            throw std::invalid_argument("drop_cascade: mode " + std::to_string(m) + " repeated in the drop order");
        }
        QpgSpec spec = QpgSpec::basis_target(d, m, kPi / 2.0);
        spec.residual_thetas = residual_thetas;
        stages.push_back(qpg_operator(spec));
        modes.push_back(m);
    }
    return run_cascade(state, stages, modes);
}

DropResult drop_cascade(const RegisterState &state, std::span<const CVector> targets) {
    std::vector<RegisterUnitary> stages;
    std::vector<std::size_t> modes;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        if (static_cast<std::size_t>(targets[k].size()) != state.dim()) {
            throw std::invalid_argument("drop_cascade: target dimension mismatch");
        }
        stages.push_back(qpg_operator(QpgSpec{targets[k], kPi / 2.0, std::nullopt}));
        modes.push_back(k);
    }
    return run_cascade(state, stages, modes);
}

RegisterState add_channel(std::span<const cplx> register_amps, cplx green, std::size_t target) {
    const std::size_t d = register_amps.size();
    CVector c(static_cast<Eigen::Index>(d + 1));
    for (std::size_t k = 0; k < d; ++k) {
        c[static_cast<Eigen::Index>(k)] = register_amps[k];
    }
    c[static_cast<Eigen::Index>(d)] = green;
    return add_channel(RegisterState(d, std::move(c), true), target);
}

RegisterState add_channel(const RegisterState &state, std::size_t target) {
    if (!state.has_green()) {
        throw std::invalid_argument("add_channel: state has no green input slot");
    }
    if (target >= state.dim()) {
        throw std::out_of_range("add_channel: target mode " + std::to_string(target) + " out of range");
    }
    if (std::abs(state.coeffs()[static_cast<Eigen::Index>(target)]) > 1e-12) {
        throw std::invalid_argument("add_channel: mode " + std::to_string(target) +
                                    " is occupied; adding would overwrite a channel");
    }
    return q100(state.dim(), target).apply(state);
}

}  // namespace tmq
