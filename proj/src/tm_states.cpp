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

#include "tmq/tm_states.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tmq {

RegisterState::RegisterState(std::size_t dim, CVector coeffs, bool has_green)
    : dim_(dim), coeffs_(std::move(coeffs)), has_green_(has_green) {
    if (dim_ == 0) {
        throw std::invalid_argument("register dimension must be positive");
    }
    const std::size_t expected = dim_ + (has_green_ ? 1 : 0);
    if (static_cast<std::size_t>(coeffs_.size()) != expected) {
        throw std::invalid_argument("register state needs " + std::to_string(expected) + " coefficients, got " +
                                    std::to_string(coeffs_.size()));
    }
    const double n2 = coeffs_.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "register state is not normalized (sum |c|^2 = " << n2 << ")";
        throw std::invalid_argument(os.str());
    }
}

RegisterState RegisterState::basis(std::size_t dim, std::size_t k, bool has_green) {
    if (k >= dim) {
        throw std::out_of_range("basis index " + std::to_string(k) + " out of range for dimension " +
                                std::to_string(dim));
    }
    CVector c = CVector::Zero(static_cast<Eigen::Index>(dim + (has_green ? 1 : 0)));
    c[static_cast<Eigen::Index>(k)] = 1.0;
    return RegisterState(dim, std::move(c), has_green);
}

RegisterState RegisterState::with_green() const {
    if (has_green_) {
        return *this;
    }
    CVector c = CVector::Zero(static_cast<Eigen::Index>(dim_ + 1));
    c.head(static_cast<Eigen::Index>(dim_)) = coeffs_;
    return RegisterState(dim_, std::move(c), true);
}

DensityMatrix::DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) {
        throw std::invalid_argument("density matrix must be square and non-empty");
    }
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) {
        std::ostringstream os;
        os << "density matrix is not Hermitian (max |rho - rho^dagger| = " << herm << ")";
        throw std::invalid_argument(os.str());
    }
    const double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "density matrix trace is " << tr << ", expected 1";
        throw std::invalid_argument(os.str());
    }
    const double min_eig = eigenvalues().minCoeff();
    if (min_eig < -1e-9) {
        std::ostringstream os;
        os << "density matrix has negative eigenvalue " << min_eig;
        throw std::invalid_argument(os.str());
    }
}

DensityMatrix DensityMatrix::pure(const CVector &psi) {
    const CVector p = psi / psi.norm();
    CMatrix rho = p * p.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(dim));
}

RVector DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

DensityTensor::DensityTensor(std::size_t dim_a, std::size_t dim_b)
    : dim_a_(dim_a), dim_b_(dim_b), data_(dim_a * dim_b * dim_a * dim_b, cplx{0.0, 0.0}) {
    if (dim_a == 0 || dim_b == 0) {
        throw std::invalid_argument("density tensor dimensions must be positive");
    }
}

DensityTensor DensityTensor::from_matrix(std::size_t dim_a, std::size_t dim_b, const CMatrix &rho) {
    const auto n = static_cast<Eigen::Index>(dim_a * dim_b);
    if (rho.rows() != n || rho.cols() != n) {
        throw std::invalid_argument("matrix shape does not match d_A d_B");
    }
    DensityTensor t(dim_a, dim_b);
    for (std::size_t i = 0; i < dim_a; ++i)
        for (std::size_t j = 0; j < dim_b; ++j)
            for (std::size_t k = 0; k < dim_a; ++k)
                for (std::size_t l = 0; l < dim_b; ++l)
                    t(i, j, k, l) = rho(static_cast<Eigen::Index>(i * dim_b + j), static_cast<Eigen::Index>(k * dim_b + l));
    return t;
}

cplx &DensityTensor::operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return data_[((i * dim_b_ + j) * dim_a_ + k) * dim_b_ + l];
}

cplx DensityTensor::operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return data_[((i * dim_b_ + j) * dim_a_ + k) * dim_b_ + l];
}

CMatrix DensityTensor::to_matrix() const {
    const auto n = static_cast<Eigen::Index>(dim_a_ * dim_b_);
    CMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            m(r, c) = data_[static_cast<std::size_t>(r * n + c)];
    return m;
}

BipartiteState BipartiteState::pure(CMatrix coeffs) {
    if (coeffs.size() == 0) {
        throw std::invalid_argument("bipartite state needs nonzero dimensions");
    }
    const double n2 = coeffs.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "bipartite state is not normalized (norm^2 = " << n2 << ")";
        throw std::invalid_argument(os.str());
    }
    return BipartiteState(std::move(coeffs));
}

BipartiteState BipartiteState::mixed(DensityTensor tensor) {
    // Validates trace, Hermiticity under (ij) <-> (kl), and positivity.
    DensityMatrix check(tensor.to_matrix());
    (void)check;
    return BipartiteState(std::move(tensor));
}

std::size_t BipartiteState::dim_a() const {
    if (is_pure()) {
        return static_cast<std::size_t>(std::get<CMatrix>(data_).rows());
    }
    return std::get<DensityTensor>(data_).dim_a();
}

std::size_t BipartiteState::dim_b() const {
    if (is_pure()) {
        return static_cast<std::size_t>(std::get<CMatrix>(data_).cols());
    }
    return std::get<DensityTensor>(data_).dim_b();
}

const CMatrix &BipartiteState::coeffs() const {
    if (!is_pure()) {
        throw std::logic_error("mixed bipartite state has no pure amplitudes");
    }
    return std::get<CMatrix>(data_);
}

DensityTensor BipartiteState::tensor() const {
    if (!is_pure()) {
        return std::get<DensityTensor>(data_);
    }
    const CMatrix &m = std::get<CMatrix>(data_);
    const auto da = static_cast<std::size_t>(m.rows());
    const auto db = static_cast<std::size_t>(m.cols());
    DensityTensor t(da, db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < db; ++j)
            for (std::size_t k = 0; k < da; ++k)
                for (std::size_t l = 0; l < db; ++l)
                    t(i, j, k, l) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                                    std::conj(m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)));
    return t;
}

DensityMatrix BipartiteState::density() const {
    CMatrix rho = tensor().to_matrix();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

BipartiteState pdc_state(std::span<const double> weights, std::optional<std::size_t> dim, bool renormalize) {
    if (weights.empty()) {
        throw std::invalid_argument("pdc_state: empty weight vector");
    }
    const std::size_t d = dim.value_or(weights.size());
    if (d == 0) {
        throw std::invalid_argument("pdc_state: dimension must be positive");
    }
    const auto n = static_cast<Eigen::Index>(d);
    CMatrix c = CMatrix::Zero(n, n);
    double kept = 0.0;
    for (std::size_t k = 0; k < std::min(d, weights.size()); ++k) {
        if (weights[k] < 0.0) {
            throw std::invalid_argument("pdc_state: Schmidt weights must be nonnegative");
        }
        c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = weights[k];
        kept += weights[k] * weights[k];
    }
    if (std::abs(kept - 1.0) > 1e-9) {
        if (!renormalize) {
            std::ostringstream os;
            os << "pdc_state: kept weights carry sum lambda = " << kept << "; pass renormalize to truncate";
            throw std::invalid_argument(os.str());
        }
        if (!(kept > 0.0)) {
            throw std::invalid_argument("pdc_state: kept weights are all zero");
        }
        c /= std::sqrt(kept);
    }
    return BipartiteState::pure(std::move(c));
}

DensityMatrix herald_unfiltered(const BipartiteState &state) {
    const CMatrix &m = state.coeffs();
    // rho_B[j, l] = sum_i psi_ij conj(psi_il)
    CMatrix rho = m.transpose() * m.conjugate();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

HeraldResult herald_qpg(const BipartiteState &state, std::size_t target, double efficiency) {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
        throw std::invalid_argument("herald_qpg: efficiency must lie in [0, 1]");
    }
    const CMatrix &m = state.coeffs();
    if (target >= static_cast<std::size_t>(m.rows())) {
        throw std::out_of_range("herald_qpg: target mode " + std::to_string(target) + " out of range (d_A = " +
                                std::to_string(m.rows()) + ")");
    }
    const CVector row = m.row(static_cast<Eigen::Index>(target)).transpose();
    const double lambda = row.squaredNorm();
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("herald_qpg: target mode carries no amplitude");
    }
    return HeraldResult{DensityMatrix::pure(row), efficiency * lambda};
}

double purity(const DensityMatrix &rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

CMatrix psd_sqrt(const CMatrix &m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    const RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.dim() != sigma.dim()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    const CMatrix sr = psd_sqrt(rho.matrix());
    CMatrix inner = sr * sigma.matrix() * sr;
    inner = 0.5 * (inner + inner.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(inner, Eigen::EigenvaluesOnly);
    const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

}  // namespace tmq
