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
#include <functional>
#include <vector>

#include <gtest/gtest.h>

using namespace tmq;

namespace {

double binomial(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

SchmidtDecomposition engineered(int order, std::size_t points, double span) {
    const FrequencyGrid g = make_grid(0.0, span, points);
    const PumpSpec pump{order, 1.0, 0.0};
    const PhasematchSpec pm{PhasematchModel::gaussian, 1.0, std::nullopt};
    SchmidtOptions opt;
    opt.reference_width = matched_schmidt_width(1.0);
    return schmidt_decompose(jsa(pump_envelope(pump, g, g), phasematching(pm, g, g)), opt);
}

}  // namespace

TEST(AnalyticWeights, EqualSqrtBinomialOverPowerOfTwo) {
    for (int n = 0; n <= 10; ++n) {
        const auto w = analytic_weights(n);
        ASSERT_EQ(w.size(), static_cast<std::size_t>(n + 1));
        for (int k = 0; k <= n; ++k) {
            EXPECT_NEAR(w[k], std::sqrt(binomial(n, k) / std::pow(2.0, n)), 1e-14);
        }
    }
}

TEST(SchmidtDecompose, MatchedGaussianWeightsFollowBinomialOracle) {
    for (int n = 0; n <= 6; ++n) {
        const SchmidtDecomposition sd = engineered(n, 256, 24.0);
        std::vector<double> oracle;
        for (int k = 0; k <= n; ++k) oracle.push_back(std::sqrt(binomial(n, k) / std::pow(2.0, n)));
        std::sort(oracle.begin(), oracle.end(), std::greater<>());
        ASSERT_GE(sd.weights.size(), n + 1) << "n=" << n;
        for (int k = 0; k <= n; ++k) {
            EXPECT_NEAR(sd.weights[k], oracle[k], 2e-3) << "n=" << n << " k=" << k;
        }
    }
}

TEST(SchmidtDecompose, SingleModeForGaussianPump) {
    const SchmidtDecomposition sd = engineered(0, 256, 24.0);
    EXPECT_GE(sd.weights[0] * sd.weights[0], 0.999);
    EXPECT_EQ(sd.truncation, 1u);
}

TEST(SchmidtDecompose, ModesAreOrthonormalAndReconstructJsa) {
    const FrequencyGrid g = make_grid(0.0, 24.0, 192);
    const PumpSpec pump{2, 1.0, 0.0};
    const PhasematchSpec pm{PhasematchModel::gaussian, 1.0, std::nullopt};
    const JointSpectralAmplitude f = jsa(pump_envelope(pump, g, g), phasematching(pm, g, g));
    SchmidtOptions opt;
    opt.truncation = 6;
    const SchmidtDecomposition sd = schmidt_decompose(f, opt);
    const CMatrix gs = sd.signal_basis().gram();
    const CMatrix gi = sd.idler_basis().gram();
    EXPECT_LT((gs - CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((gi - CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((sd.reconstruct() - f.amplitude()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SchmidtDecompose, SincPhasematchingIsMultimode) {
    const FrequencyGrid g = make_grid(0.0, 20.0, 192);
    const PumpSpec pump{0, 1.0, 0.0};
    const PhasematchSpec pm{PhasematchModel::sinc, 0.2, std::nullopt};
    const SchmidtDecomposition sd = schmidt_decompose(jsa(pump_envelope(pump, g, g), phasematching(pm, g, g)));
    EXPECT_GT(sd.truncation, 5u);
    std::vector<double> all(sd.spectrum.data(), sd.spectrum.data() + sd.spectrum.size());
    EXPECT_GT(schmidt_number(all), 1.5);
}

TEST(SchmidtDecompose, TruncationOutsideRankThrows) {
    const FrequencyGrid g = make_grid(0.0, 24.0, 64);
    const JointSpectralAmplitude f =
        jsa(pump_envelope({0, 1.0, 0.0}, g, g), phasematching({PhasematchModel::gaussian, 1.0, std::nullopt}, g, g));
    SchmidtOptions opt;
    opt.truncation = 65;
    EXPECT_THROW(schmidt_decompose(f, opt), std::invalid_argument);
}

TEST(PumpEnvelope, SupportErrorOnNarrowGrid) {
    const FrequencyGrid g = make_grid(0.0, 3.0, 64);
    EXPECT_THROW(pump_envelope({4, 1.0, 0.0}, g, g), SupportError);
}

TEST(Jsa, GridMismatchThrows) {
    const FrequencyGrid a = make_grid(0.0, 24.0, 64);
    const FrequencyGrid b = make_grid(0.0, 24.0, 65);
    EXPECT_THROW(jsa(pump_envelope({0, 1.0, 0.0}, a, a), phasematching({}, b, b)), std::invalid_argument);
}

TEST(Purity, RejectsUnnormalizedWeights) {
    const std::vector<double> w{0.5, 0.5};
    EXPECT_THROW(purity(w), std::invalid_argument);
    const std::vector<double> bell{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    EXPECT_NEAR(purity(bell), 0.5, 1e-15);
    EXPECT_NEAR(schmidt_number(bell), 2.0, 1e-14);
}
