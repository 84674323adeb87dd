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

#include "tmq/mub_qkd.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

using namespace tmq;

namespace {

RegisterState random_register(std::mt19937_64 &rng, std::size_t d) {
    std::normal_distribution<double> g;
    CVector v(static_cast<Eigen::Index>(d));
    for (auto &c : v) c = cplx{g(rng), g(rng)};
    return RegisterState(d, v / v.norm());
}

}  // namespace

TEST(MubBases, CompleteSetsAreMutuallyUnbiased) {
    for (std::size_t d = 2; d <= 5; ++d) {
        for (std::size_t m = 1; m <= d + 1; ++m) {
            const MubSet s = mub_bases(d, m);
            EXPECT_EQ(s.bases.size(), m);
            EXPECT_LE(mub_deviation(s), 1e-12) << "d=" << d << " m=" << m;
        }
    }
    EXPECT_EQ(mub_bases(4, 5).state_count(), 20u);
    EXPECT_EQ(mub_bases(2, 3).state_count(), 6u);
}

TEST(MubBases, BruteForceOverlaps) {
    const MubSet s = mub_bases(4, 5);
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = 0; b < 5; ++b)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double o = std::norm(s.bases[a].col(i).dot(s.bases[b].col(j)));
                    const double expect = a == b ? (i == j ? 1.0 : 0.0) : 0.25;
                    EXPECT_NEAR(o, expect, 1e-12);
                }
}

TEST(MubBases, UnsupportedRequestsThrow) {
    EXPECT_THROW(mub_bases(6, 2), std::invalid_argument);
    EXPECT_THROW(mub_bases(3, 5), std::invalid_argument);
    EXPECT_THROW(mub_bases(3, 0), std::invalid_argument);
}

TEST(Cascade, MatchesBornRule) {
    std::mt19937_64 rng(71);
    for (std::size_t d = 2; d <= 5; ++d) {
        const MubSet s = mub_bases(d, d + 1);
        for (int trial = 0; trial < 50; ++trial) {
            const RegisterState psi = random_register(rng, d);
            for (const auto &b : s.bases) {
                const std::vector<double> p = cascade_probabilities(psi, b);
                ASSERT_EQ(p.size(), d);
                for (std::size_t j = 0; j < d; ++j) {
                    const double born = std::norm(b.col(static_cast<Eigen::Index>(j)).dot(psi.coeffs()));
                    EXPECT_NEAR(p[j], born, 1e-12);
                }
            }
        }
    }
}

TEST(Cascade, BasisStatesMeasureDeterministically) {
    Rng rng = make_stream(3, "test");
    for (std::size_t d = 2; d <= 5; ++d) {
        const MubSet s = mub_bases(d, d + 1);
        for (const auto &b : s.bases) {
            for (std::size_t j = 0; j < d; ++j) {
                const RegisterState psi(d, b.col(static_cast<Eigen::Index>(j)));
                for (int rep = 0; rep < 20; ++rep) EXPECT_EQ(bob_cascade_measure(psi, b, rng), j);
            }
        }
    }
}

TEST(Qkd, NoEavesdropperGivesZeroErrors) {
    for (std::size_t d = 2; d <= 5; ++d) {
        const QkdRecord r = bb84_run(d, 5000, d + 1, Eavesdropper::none, 17);
        EXPECT_GT(r.sifted_length, 0u);
        EXPECT_EQ(r.errors, 0u);
        EXPECT_EQ(r.qber, 0.0);
    }
}

TEST(Qkd, EnumerationMatchesClosedForm) {
    for (std::size_t d = 2; d <= 5; ++d) {
        for (std::size_t m = 2; m <= d + 1; ++m) {
            EXPECT_NEAR(qber_enumerate(d, m, Eavesdropper::intercept_resend),
                        qber_theory(d, m, Eavesdropper::intercept_resend), 1e-12)
                << "d=" << d << " m=" << m;
            EXPECT_NEAR(qber_enumerate(d, m, Eavesdropper::none), 0.0, 1e-15);
        }
    }
    EXPECT_NEAR(qber_theory(2, 2, Eavesdropper::intercept_resend), 0.25, 1e-15);
    EXPECT_NEAR(qber_theory(2, 3, Eavesdropper::intercept_resend), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(qber_theory(4, 5, Eavesdropper::intercept_resend), 0.6, 1e-15);
}

TEST(Qkd, InterceptResendWithinFourSigma) {
    struct Case {
        std::size_t d, m;
    };
    for (const Case c : {Case{2, 2}, Case{2, 3}, Case{3, 4}, Case{4, 5}, Case{5, 2}}) {
        const QkdRecord r = bb84_run(c.d, 40000, c.m, Eavesdropper::intercept_resend, 23);
        const double q = qber_theory(c.d, c.m, Eavesdropper::intercept_resend);
        const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(r.sifted_length));
        EXPECT_LE(std::abs(r.qber - q), 4.0 * sigma) << "d=" << c.d << " m=" << c.m << " qber=" << r.qber;
    }
}

TEST(Qkd, SiftingRateIsOneOverBases) {
    const QkdRecord r = bb84_run(3, 40000, 4, Eavesdropper::none, 5);
    const double rate = static_cast<double>(r.sifted_length) / 40000.0;
    EXPECT_NEAR(rate, 0.25, 3.0 * std::sqrt(0.25 * 0.75 / 40000.0));
}

TEST(Qkd, DeterministicForSeed) {
    const QkdRecord a = bb84_run(4, 3000, 5, Eavesdropper::intercept_resend, 99, true);
    const QkdRecord b = bb84_run(4, 3000, 5, Eavesdropper::intercept_resend, 99, true);
    EXPECT_EQ(a.errors, b.errors);
    EXPECT_EQ(a.sifted_length, b.sifted_length);
    ASSERT_EQ(a.log.size(), 3000u);
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        EXPECT_EQ(a.log[i].bob_outcome, b.log[i].bob_outcome);
        EXPECT_EQ(a.log[i].eve_outcome, b.log[i].eve_outcome);
    }
    const QkdRecord c = bb84_run(4, 3000, 5, Eavesdropper::intercept_resend, 100);
    EXPECT_NE(a.errors * 100000 + a.sifted_length, c.errors * 100000 + c.sifted_length);
}

TEST(Qkd, LogIsConsistent) {
    const QkdRecord r = bb84_run(3, 2000, 4, Eavesdropper::none, 8, true);
    for (const auto &l : r.log) {
        EXPECT_FALSE(l.eve_basis.has_value());
        if (l.alice_basis == l.bob_basis) EXPECT_EQ(l.alice_symbol, l.bob_outcome);
    }
}

TEST(Qkd, ParseEavesdropper) {
    EXPECT_EQ(parse_eavesdropper("none"), Eavesdropper::none);
    EXPECT_EQ(parse_eavesdropper("intercept_resend"), Eavesdropper::intercept_resend);
    EXPECT_EQ(eavesdropper_name(Eavesdropper::intercept_resend), "intercept_resend");
    EXPECT_THROW(parse_eavesdropper("beam_splitter"), std::invalid_argument);
}
