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

#include "tmq/fusion_cluster.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

using namespace tmq;

namespace {

CVector random_vector(std::mt19937_64 &rng, Eigen::Index n) {
    std::normal_distribution<double> g;
    CVector v(n);
    for (auto &c : v) c = cplx{g(rng), g(rng)};
    return v / v.norm();
}

CMatrix random_unitary2(std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    CMatrix z(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) z(i, j) = cplx{g(rng), g(rng)};
    Eigen::HouseholderQR<CMatrix> qr(z);
    return qr.householderQ();
}

int bit_of(std::size_t x, std::size_t n, std::size_t slot) { return static_cast<int>((x >> (n - 1 - slot)) & 1u); }

// Unnormalized map of one Kraus operator on slots (a, b), fused qubit left in b's place.
CMatrix kraus_map(const CMatrix &k, std::size_t n, std::size_t a, std::size_t b) {
    const std::size_t in = std::size_t{1} << n;
    const std::size_t out = in / 2;
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
    for (std::size_t x = 0; x < in; ++x) {
        const int col = 2 * bit_of(x, n, a) + bit_of(x, n, b);
        for (int o = 0; o < 2; ++o) {
            if (k(o, col) == cplx{0.0, 0.0}) continue;
            std::size_t y = 0;
            for (std::size_t s = 0; s < n; ++s) {
                if (s == a) continue;
                y = (y << 1) | static_cast<std::size_t>(s == b ? o : bit_of(x, n, s));
            }
            m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) += k(o, col);
        }
    }
    return m;
}

double overlap(const CVector &u, const CVector &v) { return std::abs(u.dot(v)); }

}  // namespace

TEST(FusionKraus, CompletenessAndAction) {
    const auto [o1, o2] = fusion_kraus();
    CMatrix odd = CMatrix::Zero(4, 4);
    odd(1, 1) = odd(2, 2) = 1.0;
    const CMatrix sum = o1.adjoint() * o1 + o2.adjoint() * o2 + odd;
    EXPECT_LE((sum - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
    const double h = 1.0 / std::sqrt(2.0);
    CVector e00 = CVector::Zero(4), e01 = CVector::Zero(4), e11 = CVector::Zero(4);
    e00[0] = e01[1] = e11[3] = 1.0;
    EXPECT_NEAR(std::abs((o1 * e00)[0] - h), 0.0, 1e-15);
    EXPECT_NEAR(std::abs((o1 * e00)[1]), 0.0, 1e-15);
    EXPECT_NEAR((o1 * e01).norm(), 0.0, 1e-15);
    EXPECT_NEAR(std::abs((o1 * e11)[1] + h), 0.0, 1e-15);
    EXPECT_NEAR(std::abs((o2 * e11)[1] - h), 0.0, 1e-15);
}

TEST(Fusion, PlusPlusInput) {
    const double h = 1.0 / std::sqrt(2.0);
    CVector plus(2);
    plus << h, h;
    const auto dist = apply_fusion(MultiQubitState::product({plus, plus}), 0, 1);
    EXPECT_NEAR(dist[0].probability, 0.25, 1e-15);
    EXPECT_NEAR(dist[1].probability, 0.25, 1e-15);
    EXPECT_NEAR(dist[2].probability, 0.5, 1e-15);
    CVector minus(2);
    minus << h, -h;
    EXPECT_NEAR(overlap(dist[0].post_state->coeffs(), minus), 1.0, 1e-14);
    EXPECT_NEAR(overlap(dist[1].post_state->coeffs(), plus), 1.0, 1e-14);
    CVector odd = CVector::Zero(4);
    odd[1] = odd[2] = h;
    EXPECT_NEAR(overlap(dist[2].post_state->coeffs(), odd), 1.0, 1e-14);
}

TEST(Fusion, OddParityInputAlwaysFails) {
    CVector e0 = CVector::Zero(2), e1 = CVector::Zero(2);
    e0[0] = e1[1] = 1.0;
    const auto dist = apply_fusion(MultiQubitState::product({e0, e1}), 0, 1);
    EXPECT_EQ(dist[0].probability, 0.0);
    EXPECT_EQ(dist[1].probability, 0.0);
    EXPECT_FALSE(dist[0].post_state.has_value());
    EXPECT_NEAR(dist[2].probability, 1.0, 1e-15);
}

TEST(Fusion, ProbabilitiesSumToOne) {
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
        const MultiQubitState s(n, random_vector(rng, Eigen::Index{1} << n));
        const std::size_t a = static_cast<std::size_t>(trial) % n;
        const std::size_t b = (a + 1 + static_cast<std::size_t>(trial / 4) % (n - 1)) % n;
        const auto dist = apply_fusion(s, a, b);
        EXPECT_NEAR(dist[0].probability + dist[1].probability + dist[2].probability, 1.0, 1e-12);
    }
}

TEST(Fusion, MatchesBruteForceKrausMap) {
    std::mt19937_64 rng(82);
    const auto [o1, o2] = fusion_kraus();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const CVector psi = random_vector(rng, Eigen::Index{1} << n);
        const std::size_t a = static_cast<std::size_t>(trial) % n;
        const std::size_t b = (a + 1 + static_cast<std::size_t>(trial / 3) % (n - 1)) % n;
        const auto dist = apply_fusion(MultiQubitState(n, psi), a, b);
        for (int k = 0; k < 2; ++k) {
            const CVector raw = kraus_map(k == 0 ? o1 : o2, n, a, b) * psi;
            EXPECT_NEAR(dist[k].probability, raw.squaredNorm(), 1e-13);
            EXPECT_LE((dist[k].post_state->coeffs() - raw / raw.norm()).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Fusion, CommutesWithSpectatorUnitaries) {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 50; ++trial) {
        const MultiQubitState s(4, random_vector(rng, 16));
        const CMatrix u = random_unitary2(rng);
        const auto before = apply_fusion(apply_local(s, 3, u), 0, 2);
        const auto after = apply_fusion(s, 0, 2);
        for (int k = 0; k < 2; ++k) {
            EXPECT_NEAR(before[k].probability, after[k].probability, 1e-12);
            const CVector lhs = apply_local(*after[k].post_state, 2, u).coeffs();
            EXPECT_LE((before[k].post_state->coeffs() - lhs).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Fusion, TwoBellPairsGiveGhzClassState) {
    const MultiQubitState pair = bell_pair();
    CVector joint(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) joint[4 * i + j] = pair.coeffs()[i] * pair.coeffs()[j];
    const auto dist = apply_fusion(MultiQubitState(4, joint), 1, 2);
    EXPECT_NEAR(dist[0].probability + dist[1].probability, 0.5, 1e-14);
    const double h = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < 2; ++k) {
        const CVector &c = dist[k].post_state->coeffs();
        EXPECT_NEAR(std::abs(c[0b010]), h, 1e-14);
        EXPECT_NEAR(std::abs(c[0b101]), h, 1e-14);
    }
    const cplx rel0 = dist[0].post_state->coeffs()[0b101] / dist[0].post_state->coeffs()[0b010];
    const cplx rel1 = dist[1].post_state->coeffs()[0b101] / dist[1].post_state->coeffs()[0b010];
    EXPECT_NEAR(std::abs(rel0 + rel1), 0.0, 1e-14);
}

TEST(Fusion, SampledOutcomeFollowsDistribution) {
    const double h = 1.0 / std::sqrt(2.0);
    CVector plus(2);
    plus << h, h;
    const MultiQubitState s = MultiQubitState::product({plus, plus});
    Rng rng = make_stream(4, "fusion");
    int fails = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) fails += apply_fusion(s, 0, 1, rng).detector == Detector::failure;
    EXPECT_NEAR(fails / static_cast<double>(n), 0.5, 3.0 * std::sqrt(0.25 / n));
}

TEST(Fusion, InvalidSlotsThrow) {
    const MultiQubitState s = bell_pair();
    EXPECT_THROW(apply_fusion(s, 0, 0), std::invalid_argument);
    EXPECT_THROW(apply_fusion(s, 0, 2), std::out_of_range);
}

TEST(Cluster, IdealClustersPassVerification) {
    for (std::size_t n : {2u, 3u, 5u}) {
        const ClusterReport r = verify_cluster(linear_cluster(n), n);
        EXPECT_TRUE(r.pass);
        for (double k : r.stabilizers) EXPECT_NEAR(k, 1.0, 1e-12);
    }
    EXPECT_TRUE(verify_cluster(cluster_pair(), 2).pass);
}

TEST(Cluster, ProductStateFails) {
    CVector e0 = CVector::Zero(2);
    e0[0] = 1.0;
    EXPECT_FALSE(verify_cluster(MultiQubitState::product({e0, e0, e0}), 3).pass);
}

TEST(Cluster, BitFlipFlipsNeighbourStabilizers) {
    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    const ClusterReport r = verify_cluster(apply_local(linear_cluster(5), 2, x), 5);
    EXPECT_FALSE(r.pass);
    const std::vector<double> expect{1, -1, 1, -1, 1};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(r.stabilizers[i], expect[i], 1e-12);
}

TEST(Cluster, GrownClustersAreClusterStates) {
    for (FailurePolicy p : {FailurePolicy::truncate, FailurePolicy::keep_chain}) {
        for (std::size_t n : {2u, 3u, 4u, 6u}) {
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                Rng rng = make_stream(seed, "cluster", n);
                const ClusterGrowth g = grow_linear_cluster(n, std::nullopt, rng, p);
                ASSERT_EQ(g.state.n(), n);
                const ClusterReport r = verify_cluster(g.state, n);
                EXPECT_TRUE(r.pass) << failure_policy_name(p) << " n=" << n << " seed=" << seed;
                EXPECT_NEAR(overlap(g.state.coeffs(), linear_cluster(n).coeffs()), 1.0, 1e-10);
                EXPECT_EQ(g.report.attempts, g.report.successes + g.report.failures);
            }
        }
    }
}

TEST(Cluster, KeepChainCostsTwoPairsPerQubit) {
    const int trials = 1000;
    const std::size_t target = 6;
    double pairs = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng rng = make_stream(11, "keep", static_cast<std::uint64_t>(t));
        pairs += static_cast<double>(
            grow_linear_cluster(target, std::nullopt, rng, FailurePolicy::keep_chain).report.pairs_consumed);
    }
    const double per_added = (pairs / trials - 1.0) / static_cast<double>(target - 2);
    const double sigma = std::sqrt(2.0 / (trials * static_cast<double>(target - 2)));
    EXPECT_NEAR(per_added, 2.0, 4.0 * sigma);
}

TEST(Cluster, TruncateMatchesMarkovChain) {
    const std::size_t target = 3;
    // expected pairs from chain length n, 0 = empty
    const Eigen::Index m = static_cast<Eigen::Index>(target);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Ones(m);
    auto at = [&](Eigen::Index row, Eigen::Index n, double w) {
        if (n < m) a(row, n) -= w;
    };
    a(0, 0) = 1.0;
    at(0, 2, 1.0);
    for (Eigen::Index n = 1; n < m; ++n) {
        a(n, n) += 1.0;
        at(n, n + 1, 0.5);
        at(n, n - 1, 0.5);
    }
    const Eigen::VectorXd e = a.colPivHouseholderQr().solve(rhs);
    const double expected = e[0];
    EXPECT_NEAR(expected, 4.5, 1e-12);

    const int trials = 2000;
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng rng = make_stream(12, "trunc", static_cast<std::uint64_t>(t));
        const double p = static_cast<double>(grow_linear_cluster(target, std::nullopt, rng).report.pairs_consumed);
        sum += p;
        sum2 += p * p;
    }
    const double mean = sum / trials;
    const double sd = std::sqrt((sum2 / trials - mean * mean) / trials);
    EXPECT_NEAR(mean, expected, 4.0 * sd);
}

TEST(Cluster, SupplyExhaustedThrows) {
    Rng rng = make_stream(1, "supply");
    EXPECT_THROW(grow_linear_cluster(50, 3, rng), std::runtime_error);
    EXPECT_THROW(grow_linear_cluster(1, std::nullopt, rng), std::invalid_argument);
    EXPECT_EQ(parse_failure_policy("keep_chain"), FailurePolicy::keep_chain);
    EXPECT_THROW(parse_failure_policy("retry"), std::invalid_argument);
}
