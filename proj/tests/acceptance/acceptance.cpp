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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "tmq/fusion_cluster.hpp"
#include "tmq/gate_compiler.hpp"
#include "tmq/mub_qkd.hpp"
#include "tmq/pdc_model.hpp"
#include "tmq/qpg_core.hpp"
#include "tmq/tm_states.hpp"
#include "tmq/tomography.hpp"
#include "tmq_cli.hpp"

using namespace tmq;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string &what) {
        if (!cond) {
            if (ok) detail << what;
            ok = false;
        }
    }
};

double binomial(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

CVector random_unit(std::mt19937_64 &rng, Eigen::Index d) {
    std::normal_distribution<double> g;
    CVector v(d);
    for (auto &c : v) c = cplx{g(rng), g(rng)};
    return v / v.norm();
}

CMatrix random_unitary(std::mt19937_64 &rng, Eigen::Index d) {
    std::normal_distribution<double> g;
    CMatrix z(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) z(i, j) = cplx{g(rng), g(rng)};
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR();
    for (Eigen::Index j = 0; j < d; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
    return q;
}

CMatrix random_rho(std::mt19937_64 &rng, Eigen::Index d) {
    std::normal_distribution<double> g;
    CMatrix z(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) z(i, j) = cplx{g(rng), g(rng)};
    CMatrix rho = z * z.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

double unitarity_residual(const CMatrix &u) {
    return (u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

SchmidtDecomposition engineered(int order, std::size_t points, double span) {
    const FrequencyGrid g = make_grid(0.0, span, points);
    SchmidtOptions opt;
    opt.reference_width = matched_schmidt_width(1.0);
    return schmidt_decompose(jsa(pump_envelope({order, 1.0, 0.0}, g, g),
                                 phasematching({PhasematchModel::gaussian, 1.0, std::nullopt}, g, g)),
                             opt);
}

Check bell_pair_from_hg1() {
    Check c;
    const SchmidtDecomposition sd = engineered(1, 512, 24.0);
    std::vector<double> big;
    for (double w : sd.spectrum) {
        if (w > 1e-3) big.push_back(w);
    }
    c.detail << "weights above 1e-3:";
    for (double w : big) c.detail << " " << w;
    c.require(big.size() == 2, "; expected exactly two");
    for (double w : big) c.require(std::abs(w - 1.0 / std::sqrt(2.0)) <= 2e-3, "; weight off 1/sqrt2");
    return c;
}

Check binomial_oracle() {
    Check c;
    double worst = 0.0;
    double lambda0 = 0.0;
    for (int n = 0; n <= 6; ++n) {
        const SchmidtDecomposition sd = engineered(n, 256, 24.0);
        std::vector<double> oracle;
        for (int k = 0; k <= n; ++k) oracle.push_back(std::sqrt(binomial(n, k) / std::pow(2.0, n)));
        std::sort(oracle.begin(), oracle.end(), std::greater<>());
        for (int k = 0; k <= n; ++k) worst = std::max(worst, std::abs(sd.spectrum[k] - oracle[k]));
        if (n == 0) lambda0 = sd.spectrum[0] * sd.spectrum[0];
    }
    c.detail << "max |w - oracle| = " << worst << ", lambda_0(n=0) = " << lambda0;
    c.require(worst <= 2e-3, "; weight mismatch");
    c.require(lambda0 >= 0.999, "; n=0 not single mode");
    return c;
}

Check qpg_algebra() {
    Check c;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(0.0, kPi / 2.0);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const Eigen::Index d = 2 + t % 6;
        worst = std::max(worst, unitarity_residual(qpg_operator({random_unit(rng, d), th(rng), std::nullopt}).matrix()));
    }
    double stage = 0.0;
    for (int t = 0; t < 20; ++t) {
        const CVector v = random_unit(rng, 2 + t % 4);
        stage = std::max(stage, (two_stage(v, 0.0).matrix() - qpg_operator({v, kPi / 2.0, std::nullopt}).matrix())
                                    .cwiseAbs()
                                    .maxCoeff());
    }
    const std::vector<double> ideal{kPi / 2.0, 0.0, 0.0, 0.0};
    const std::vector<double> half{kPi / 2.0, kPi / 2.0, 0.0, 0.0};
    const double eta = 0.87;
    const double r = std::asin(std::sqrt((eta * eta / 0.80 - eta) / 3.0));
    QpgSpec op = QpgSpec::from_efficiency(CVector::Unit(4, 0), eta);
    op.residual_thetas = std::vector<double>{0.0, r, r, r};
    const double s_op = selectivity(op);
    c.detail << "unitarity " << worst << ", two_stage " << stage << ", S = " << selectivity(ideal, 0) << "/"
             << selectivity(half, 0) << ", operating point eta=" << op.efficiency() << " S=" << s_op;
    c.require(worst <= 1e-12, "; unitarity");
    c.require(stage <= 1e-12, "; two_stage");
    c.require(selectivity(ideal, 0) == 1.0 && selectivity(half, 0) == 0.5, "; canonical selectivity");
    c.require(std::abs(op.efficiency() - 0.87) <= 1e-12 && std::abs(s_op - 0.80) <= 1e-12, "; operating point");
    return c;
}

Check gates() {
    Check c;
    double worst = 0.0;
    for (double phi : {kPi / 3.0, 0.7, 2.5}) {
        for (const GateCheck &g : verify_all_gates(phi)) worst = std::max({worst, g.distance, g.leakage});
    }
    std::mt19937_64 rng(4);
    double round_trip = 0.0;
    for (int t = 0; t < 100; ++t) {
        const CMatrix u = random_unitary(rng, 4);
        round_trip = std::max(round_trip, phase_distance(evaluate(compile_qudit_unitary(u)).register_block(), u));
    }
    c.detail << "gate distance " << worst << ", d=4 round trip " << round_trip;
    c.require(worst <= 1e-12, "; gate mismatch");
    c.require(round_trip <= 1e-10, "; round trip");
    return c;
}

double sampled_error(const DensityMatrix &rho, std::uint64_t shots, int reps) {
    double acc = 0.0;
    const auto plan = single_full_plan(static_cast<std::size_t>(rho.dim()));
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<RateRecord> recs;
        for (std::size_t k = 0; k < plan.size(); ++k) {
            Rng r = make_stream(static_cast<std::uint64_t>(rep) * 1000 + shots, "tomo", k);
            recs.push_back(simulate_single(rho, plan[k], shots, &r));
        }
        acc += (reconstruct_single(recs, static_cast<std::size_t>(rho.dim())).values - rho.matrix()).norm();
    }
    return acc / reps;
}

Check tomography() {
    Check c;
    std::mt19937_64 rng(5);
    double single = 0.0;
    for (Eigen::Index d = 1; d <= 6; ++d) {
        const CMatrix truth = random_rho(rng, d);
        std::vector<RateRecord> recs;
        for (const auto &s : single_full_plan(static_cast<std::size_t>(d)))
            recs.push_back(simulate_single(DensityMatrix(truth), s));
        single = std::max(single, (reconstruct_single(recs, static_cast<std::size_t>(d)).values - truth).cwiseAbs().maxCoeff());
    }
    double bi = 0.0;
    for (std::size_t da = 2; da <= 6; ++da) {
        for (std::size_t db : {da, std::size_t{2}}) {
            const CMatrix truth = random_rho(rng, static_cast<Eigen::Index>(da * db));
            const BipartiteState s = BipartiteState::mixed(DensityTensor::from_matrix(da, db, truth));
            std::vector<CoincidenceRecord> recs;
            for (std::size_t m = 0; m < da; ++m)
                for (std::size_t n = m + 1; n < da; ++n)
                    for (std::size_t p = 0; p < db; ++p)
                        for (std::size_t q = p + 1; q < db; ++q)
                            for (const auto &[a, b] : biphoton_setting_cycle(m, n, p, q))
                                recs.push_back(simulate_biphoton(s, a, b));
            bi = std::max(bi, (reconstruct_biphoton(recs, da, db).values.to_matrix() - truth).cwiseAbs().maxCoeff());
        }
    }
    const DensityMatrix rho(random_rho(rng, 3));
    std::vector<double> xs, ys;
    for (std::uint64_t n : {10000ull, 100000ull, 1000000ull}) {
        xs.push_back(std::log10(static_cast<double>(n)));
        ys.push_back(std::log10(sampled_error(rho, n, 20)));
    }
    const double xm = (xs[0] + xs[1] + xs[2]) / 3.0;
    const double ym = (ys[0] + ys[1] + ys[2]) / 3.0;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 3; ++i) {
        sxy += (xs[i] - xm) * (ys[i] - ym);
        sxx += (xs[i] - xm) * (xs[i] - xm);
    }
    const double slope = sxy / sxx;
    c.detail << "single " << single << ", biphoton " << bi << ", shot-noise exponent " << slope;
    c.require(single <= 1e-10 && bi <= 1e-10, "; noiseless round trip");
    c.require(std::abs(slope + 0.5) <= 0.1, "; exponent");
    return c;
}

Check mubs() {
    Check c;
    double worst = 0.0;
    for (std::size_t d = 2; d <= 5; ++d) {
        const MubSet s = mub_bases(d, d + 1);
        for (std::size_t a = 0; a < s.bases.size(); ++a)
            for (std::size_t b = a + 1; b < s.bases.size(); ++b)
                worst = std::max(worst, ((s.bases[a].adjoint() * s.bases[b]).cwiseAbs2().array() - 1.0 / d)
                                            .abs()
                                            .maxCoeff());
        worst = std::max(worst, mub_deviation(s));
    }
    const MubSet four = mub_bases(4, 5);
    c.detail << "max overlap deviation " << worst << ", d=4: " << four.bases.size() << " bases, "
             << four.state_count() << " states";
    c.require(worst <= 1e-12, "; overlaps");
    c.require(four.bases.size() == 5 && four.state_count() == 20, "; d=4 count");
    return c;
}

Check qkd() {
    Check c;
    std::uint64_t clean_errors = 0;
    for (std::size_t d = 2; d <= 5; ++d) clean_errors += bb84_run(d, 20000, d + 1, Eavesdropper::none, 1).errors;
    const QkdRecord two = bb84_run(2, 200000, 2, Eavesdropper::intercept_resend, 2);
    const QkdRecord four = bb84_run(4, 100000, 5, Eavesdropper::intercept_resend, 3);
    auto sigma = [](double q, std::uint64_t n) { return std::sqrt(q * (1.0 - q) / static_cast<double>(n)); };
    const double q2 = qber_theory(2, 2, Eavesdropper::intercept_resend);
    const double q4 = qber_theory(4, 5, Eavesdropper::intercept_resend);
    const double e2 = qber_enumerate(2, 2, Eavesdropper::intercept_resend);
    const double e4 = qber_enumerate(4, 5, Eavesdropper::intercept_resend);
    c.detail << "eve=none errors " << clean_errors << "; d=2 qber " << two.qber << " over " << two.sifted_length
             << " sifted (theory " << q2 << "); d=4 M=5 qber " << four.qber << " over " << four.sifted_length
             << " sifted (theory " << q4 << ")";
    c.require(clean_errors == 0, "; errors without eavesdropper");
    c.require(two.sifted_length >= 100000, "; too few sifted bits");
    c.require(std::abs(two.qber - q2) <= 3.0 * sigma(q2, two.sifted_length), "; d=2 qber");
    c.require(std::abs(four.qber - q4) <= 3.0 * sigma(q4, four.sifted_length), "; d=4 qber");
    c.require(std::abs(q2 - 0.25) < 1e-15 && std::abs(e2 - q2) < 1e-12 && std::abs(e4 - q4) < 1e-12,
              "; theory vs enumeration");
    return c;
}

Check fusion() {
    Check c;
    const auto [o1, o2] = fusion_kraus();
    CMatrix odd = CMatrix::Zero(4, 4);
    odd(1, 1) = odd(2, 2) = 1.0;
    const double completeness =
        (o1.adjoint() * o1 + o2.adjoint() * o2 + odd - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff();
    const double h = 1.0 / std::sqrt(2.0);
    CVector plus(2), minus(2);
    plus << h, h;
    minus << h, -h;
    const auto sym = apply_fusion(MultiQubitState::product({plus, plus}), 0, 1);
    const double fused = std::max(phase_distance(sym[0].post_state->coeffs(), minus),
                                  phase_distance(sym[1].post_state->coeffs(), plus));
    const MultiQubitState pair = bell_pair();
    CVector joint(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) joint[4 * i + j] = pair.coeffs()[i] * pair.coeffs()[j];
    const auto two = apply_fusion(MultiQubitState(4, joint), 1, 2);
    const double p_success = two[0].probability + two[1].probability;
    Rng rng = make_stream(8, "acceptance");
    double worst_stab = 1.0;
    for (int t = 0; t < 20; ++t) {
        const ClusterGrowth g = grow_linear_cluster(3, std::nullopt, rng);
        for (double k : verify_cluster(g.state, 3).stabilizers) worst_stab = std::min(worst_stab, k);
    }
    c.detail << "completeness " << completeness << ", fused-state distance " << fused << ", p(D1)+p(D2) = "
             << p_success << ", min 3-qubit stabilizer " << worst_stab;
    c.require(completeness <= 1e-14, "; completeness");
    c.require(fused <= 1e-12 && std::abs(sym[0].probability - 0.25) <= 1e-15, "; fused state");
    c.require(std::abs(p_success - 0.5) <= 1e-15, "; two-pair success");
    c.require(worst_stab >= 1.0 - 1e-10, "; stabilizers");
    return c;
}

Check purification() {
    Check c;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double herald_purity = 0.0, unfiltered = 0.0, rate = 0.0;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> w;
        if (t < 7) {
            w = analytic_weights(t);
        } else {
            const int n = 1 + t % 8;
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                w.push_back(u(rng));
                s += w.back() * w.back();
            }
            for (double &x : w) x /= std::sqrt(s);
        }
        const BipartiteState st = pdc_state(w);
        double sum_sq = 0.0;
        for (double x : w) sum_sq += std::pow(x, 4);
        unfiltered = std::max(unfiltered, std::abs(purity(herald_unfiltered(st)) - sum_sq));
        const double eta = u(rng);
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (w[k] == 0.0) continue;
            const HeraldResult hr = herald_qpg(st, k, eta);
            herald_purity = std::max(herald_purity, std::abs(purity(hr.state) - 1.0));
            rate = std::max(rate, std::abs(hr.rate - eta * w[k] * w[k]));
        }
    }
    c.detail << "|purity - 1| " << herald_purity << ", |unfiltered - sum lambda^2| " << unfiltered
             << ", |rate - eta lambda| " << rate;
    c.require(herald_purity <= 1e-12, "; heralded purity");
    c.require(unfiltered <= 1e-12, "; unfiltered purity");
    c.require(rate <= 1e-15, "; rate");
    return c;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

Check reproducibility() {
    Check c;
    const fs::path root = fs::temp_directory_path() / "tmq_acceptance_repro";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::vector<std::pair<std::string, std::string>> runs{
        {"qkd", R"({"d": 4, "n_bases": 5, "n_rounds": 5000, "eve": "intercept_resend", "log": true})"},
        {"tomo", R"({"kind": "biphoton", "dim_a": 3, "dim_b": 2, "shots": 10000, "sanitize": true})"},
        {"cluster", R"({"target_n": 4, "trials": 20, "policy": "truncate"})"},
        {"fuse", R"({"qubits": [[0.6, 0.8], [0.8, 0.6], [1, 0]], "slot_a": 0, "slot_b": 2, "sample": true})"},
        {"gates", R"({"mode": "compile_unitary", "dim": 3, "count": 2})"},
    };
    std::size_t compared = 0;
    for (const auto &[cmd, cfg] : runs) {
        const fs::path cfg_path = root / (cmd + ".json");
        std::ofstream(cfg_path) << cfg;
        for (const char *tag : {"first", "second"}) {
            std::ostringstream out, err;
            const int code = cli::run_cli(
                {cmd, "--config", cfg_path.string(), "--seed", "42", "--out", (root / cmd / tag).string()}, out, err);
            c.require(code == 0, "; " + cmd + " failed: " + err.str());
        }
        if (!c.ok) continue;
        const auto manifest = nlohmann::json::parse(slurp(root / cmd / "first" / "manifest.json"));
        for (const auto &name : manifest["outputs"]) {
            const std::string n = name.get<std::string>();
            c.require(slurp(root / cmd / "first" / n) == slurp(root / cmd / "second" / n), "; " + cmd + "/" + n + " differs");
            ++compared;
        }
    }
    c.detail << compared << " output files byte-identical across two runs";
    fs::remove_all(root);
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"schmidt-bell", bell_pair_from_hg1}, {"binomial-oracle", binomial_oracle}, {"qpg-algebra", qpg_algebra},
        {"gates", gates},                     {"tomography", tomography},           {"mubs", mubs},
        {"qkd", qkd},                         {"fusion", fusion},                   {"purification", purification},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = criteria[i].second();
        } catch (const std::exception &e) {
            c.ok = false;
            c.detail << "exception: " << e.what();
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %-16s %s (%.1fs)\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    c.detail.str().c_str(), s);
        std::fflush(stdout);
        failed += c.ok ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
