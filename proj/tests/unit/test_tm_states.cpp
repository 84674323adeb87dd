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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tmq/pdc_model.hpp"

using namespace tmq;

namespace {

std::vector<double> random_weights(std::mt19937_64 &rng, std::size_t d) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> w(d);
    double s = 0.0;
    for (auto &x : w) {
        x = u(rng);
        s += x * x;
    }
    for (auto &x : w) x /= std::sqrt(s);
    return w;
}

CMatrix random_coeffs(std::mt19937_64 &rng, Eigen::Index da, Eigen::Index db) {
    std::normal_distribution<double> g;
    CMatrix m(da, db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < db; ++j) m(i, j) = cplx{g(rng), g(rng)};
    return m / m.norm();
}

}  // namespace

TEST(RegisterState, NormIsChecked) {
    CVector v(2);
    v << 1.0, 1.0;
    EXPECT_THROW(RegisterState(2, v), std::invalid_argument);
    EXPECT_NO_THROW(RegisterState(2, v / std::sqrt(2.0)));
}

TEST(DensityMatrix, RejectsInvalidMatrices) {
    CMatrix notrace = CMatrix::Identity(2, 2);
    EXPECT_THROW(DensityMatrix{notrace}, std::invalid_argument);
    CMatrix neg(2, 2);
    neg << 1.2, 0.0, 0.0, -0.2;
    EXPECT_THROW(DensityMatrix{neg}, std::invalid_argument);
    CMatrix nonherm(2, 2);
    nonherm << 0.5, 0.1, 0.0, 0.5;
    EXPECT_THROW(DensityMatrix{nonherm}, std::invalid_argument);
}

TEST(DensityTensor, MatrixRoundTrip) {
    std::mt19937_64 rng(3);
    const CMatrix c = random_coeffs(rng, 2, 3);
    const BipartiteState s = BipartiteState::pure(c);
    const CMatrix m = s.density().matrix();
    const DensityTensor t = DensityTensor::from_matrix(2, 3, m);
    EXPECT_LT((t.to_matrix() - m).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(std::abs(t(1, 2, 0, 1) - c(1, 2) * std::conj(c(0, 1))), 0.0, 1e-15);
}

TEST(Herald, UnfilteredPurityEqualsSumOfSquaredLambdas) {
    std::mt19937_64 rng(11);
    for (std::size_t d = 1; d <= 8; ++d) {
        const auto w = random_weights(rng, d);
        double expect = 0.0;
        for (double x : w) expect += std::pow(x, 4);
        EXPECT_NEAR(purity(herald_unfiltered(pdc_state(w))), expect, 1e-12);
    }
}

TEST(Herald, QpgHeraldIsPureWithRateEtaLambda) {
    std::mt19937_64 rng(12);
    for (std::size_t d = 1; d <= 6; ++d) {
        const auto w = random_weights(rng, d);
        const BipartiteState s = pdc_state(w);
        for (std::size_t k = 0; k < d; ++k) {
            for (double eta : {1.0, 0.87, 0.3}) {
                const HeraldResult h = herald_qpg(s, k, eta);
                EXPECT_NEAR(purity(h.state), 1.0, 1e-12);
                EXPECT_NEAR(h.rate, eta * w[k] * w[k], 1e-15);
                EXPECT_NEAR(h.state(k, k).real(), 1.0, 1e-12);
            }
        }
    }
}

TEST(Herald, QpgHeraldOfGeneralPureStateIsPure) {
    std::mt19937_64 rng(13);
    const BipartiteState s = BipartiteState::pure(random_coeffs(rng, 3, 4));
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(purity(herald_qpg(s, k, 0.5).state), 1.0, 1e-12);
    }
    EXPECT_THROW(herald_qpg(s, 3, 0.5), std::out_of_range);
}

TEST(PdcState, TruncationNeedsRenormalizeFlag) {
    const auto w = analytic_weights(4);
    EXPECT_THROW(pdc_state(w, 2), std::invalid_argument);
    const BipartiteState s = pdc_state(w, 2, true);
    EXPECT_NEAR(s.coeffs().norm(), 1.0, 1e-12);
}

TEST(Fidelity, IdenticalAndOrthogonalStates) {
    CVector a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    EXPECT_NEAR(fidelity(DensityMatrix::pure(a), DensityMatrix::pure(a)), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(DensityMatrix::pure(a), DensityMatrix::pure(b)), 0.0, 1e-12);
    EXPECT_NEAR(fidelity(DensityMatrix::pure(a), DensityMatrix::maximally_mixed(2)), 0.5, 1e-12);
}
