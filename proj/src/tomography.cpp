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

#include "tmq/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace tmq {

namespace {

void check_setting(const AnalyzerSetting &s, std::size_t dim) {
    if (s.first >= dim || s.second >= dim) {
        throw std::out_of_range("analyzer mode index out of range for dimension " + std::to_string(dim));
    }
    if (!(s.zeta >= 0.0 && s.zeta <= 1.0)) {
        throw std::invalid_argument("analyzer zeta must lie in [0, 1]");
    }
    if (s.first == s.second && s.zeta != 1.0) {
        throw std::invalid_argument("analyzer with equal modes needs zeta = 1");
    }
}

double side_weight(double zeta) { return std::sqrt(std::max(0.0, 1.0 - zeta * zeta)); }

// Restriction of the analyzer ket to the modes in `modes`.
CVector restrict(const CVector &v, const std::vector<std::size_t> &modes) {
    CVector r(static_cast<Eigen::Index>(modes.size()));
    for (std::size_t i = 0; i < modes.size(); ++i) {
        r[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(modes[i])];
    }
    return r;
}

// Least-squares Hermitian X with v_r^dagger X v_r = y_r. Parameters: real diagonal,
// then (Re, Im) of each upper off-diagonal entry.
CMatrix fit_hermitian(const std::vector<CVector> &vs, const std::vector<double> &ys, Eigen::Index n,
                      const std::vector<std::size_t> &tag, double *residual) {
    const Eigen::Index np = n * n;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(vs.size()), np);
    Eigen::VectorXd y(static_cast<Eigen::Index>(vs.size()));
    for (std::size_t r = 0; r < vs.size(); ++r) {
        const CVector &v = vs[r];
        const auto row = static_cast<Eigen::Index>(r);
        Eigen::Index col = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            a(row, col++) = std::norm(v[i]);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const cplx w = std::conj(v[i]) * v[j];
                a(row, col++) = 2.0 * w.real();
                a(row, col++) = -2.0 * w.imag();
            }
        }
        y[row] = ys[r];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-9);
    if (qr.rank() < np) {
        std::ostringstream os;
        os << "missing settings for index tuple (";
        for (std::size_t i = 0; i < tag.size(); ++i) {
            os << (i ? "," : "") << tag[i];
        }
        os << "): " << qr.rank() << " independent equations for " << np << " unknowns";
        throw TomographyError(os.str(), tag);
    }
    const Eigen::VectorXd x = qr.solve(y);
    if (residual != nullptr) {
        *residual = std::max(*residual, (a * x - y).cwiseAbs().maxCoeff());
    }
    CMatrix out(n, n);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = x[col++];
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out(i, j) = cplx{x[col], x[col + 1]};
            out(j, i) = std::conj(out(i, j));
            col += 2;
        }
    }
    return out;
}

double checked_ratio(double converted, double total, const std::vector<std::size_t> &tag) {
    if (!(total > 0.0) || !std::isfinite(total) || converted < 0.0 || converted > total * (1.0 + 1e-12)) {
        throw TomographyError("inconsistent normalization in rate record", tag);
    }
    return converted / total;
}

std::uint64_t draw_binomial(std::uint64_t n, double p, Rng &rng) {
    p = std::clamp(p, 0.0, 1.0);
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<std::uint64_t> dist(n, p);
    return dist(rng);
}

}  // namespace

CVector analyzer_vector(const AnalyzerSetting &s, std::size_t dim) {
    check_setting(s, dim);
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(s.first)] += s.zeta;
    if (s.first != s.second) {
        v[static_cast<Eigen::Index>(s.second)] += side_weight(s.zeta) * std::polar(1.0, -s.phi);
    }
    return v;
}

RateRecord simulate_single(const DensityMatrix &rho, const AnalyzerSetting &s, std::optional<std::uint64_t> shots,
                           Rng *rng) {
    const CVector v = analyzer_vector(s, rho.dim());
    const double p = std::clamp((v.adjoint() * rho.matrix() * v)(0, 0).real(), 0.0, 1.0);
    RateRecord rec{s, p, 1.0 - p, shots};
    if (shots) {
        if (rng == nullptr) {
            throw std::invalid_argument("simulate_single: sampled mode needs a generator");
        }
        const std::uint64_t c = draw_binomial(*shots, p, *rng);
        rec.converted = static_cast<double>(c);
        rec.transmitted = static_cast<double>(*shots - c);
    }
    return rec;
}

double single_rate_formula(const DensityMatrix &rho, const AnalyzerSetting &s) {
    check_setting(s, rho.dim());
    if (s.first == s.second) {
        return rho(s.first, s.first).real();
    }
    const double z = s.zeta;
    const double r = side_weight(z);
    return z * z * rho(s.first, s.first).real() + r * r * rho(s.second, s.second).real() +
           2.0 * (z * r * std::polar(1.0, s.phi) * rho(s.second, s.first)).real();
}

CoincidenceRecord simulate_biphoton(const BipartiteState &state, const AnalyzerSetting &a, const AnalyzerSetting &b,
                                    std::optional<std::uint64_t> shots, Rng *rng) {
    const std::size_t da = state.dim_a();
    const std::size_t db = state.dim_b();
    const CVector va = analyzer_vector(a, da);
    const CVector vb = analyzer_vector(b, db);
    const CMatrix rho = state.density().matrix();
    const auto n = static_cast<Eigen::Index>(da * db);
    const CMatrix pa = va * va.adjoint();
    const CMatrix pb = vb * vb.adjoint();
    const CMatrix ia = CMatrix::Identity(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(da));
    const CMatrix ib = CMatrix::Identity(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db));
    auto kron = [&](const CMatrix &x, const CMatrix &y) {
        CMatrix k(n, n);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                k.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        return k;
    };
    const std::array<CMatrix, 4> ops{kron(pa, pb), kron(pa, ib - pb), kron(ia - pa, pb), kron(ia - pa, ib - pb)};
    CoincidenceRecord rec{a, b, {}, shots};
    for (std::size_t i = 0; i < 4; ++i) {
        rec.rates[i] = std::max(0.0, (rho * ops[i]).trace().real());
    }
    if (shots) {
        if (rng == nullptr) {
            throw std::invalid_argument("simulate_biphoton: sampled mode needs a generator");
        }
        const double total = rec.total();
        std::uint64_t left = *shots;
        double mass = 1.0;
        std::array<double, 4> counts{};
        for (std::size_t i = 0; i < 4; ++i) {
            const double p = rec.rates[i] / total;
            const std::uint64_t c = i == 3 ? left : draw_binomial(left, mass > 0.0 ? p / mass : 0.0, *rng);
            counts[i] = static_cast<double>(c);
            left -= c;
            mass -= p;
        }
        rec.rates = counts;
    }
    return rec;
}

double expanded_biphoton_ratio(const DensityTensor &c, const AnalyzerSetting &a, const AnalyzerSetting &b,
                              bool corrected) {
    check_setting(a, c.dim_a());
    check_setting(b, c.dim_b());
    const std::size_t m = a.first, n = a.second, p = b.first, q = b.second;
    auto cp = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) { return c(l, k, i, j); };
    const double za = a.zeta, zb = b.zeta;
    const double za2 = za * za, zb2 = zb * zb;
    const double ra = corrected ? side_weight(za) : std::sqrt(std::max(0.0, 1.0 - za));
    const double rb = corrected ? side_weight(zb) : std::sqrt(std::max(0.0, 1.0 - zb));
    const cplx x = corrected ? cp(n, p, q, n) : cp(n, q, q, n);
    const double diag = za2 * zb2 * cp(m, p, p, m).real() + (1.0 - za2) * (1.0 - zb2) * cp(n, q, q, n).real() +
                        za2 * (1.0 - zb2) * cp(m, q, q, m).real() + (1.0 - za2) * zb2 * cp(n, p, p, n).real();
    const cplx cross = std::polar(1.0, a.phi) * za * ra * (zb2 * cp(m, p, p, n) + (1.0 - zb2) * cp(m, q, q, n)) +
                       std::polar(1.0, b.phi) * zb * rb * (za2 * cp(m, p, q, m) + (1.0 - za2) * x) +
                       za * zb * ra * rb *
                           (std::polar(1.0, a.phi + b.phi) * cp(m, p, q, n) +
                            std::polar(1.0, a.phi - b.phi) * cp(m, q, p, n));
    return diag + 2.0 * cross.real();
}

std::vector<AnalyzerSetting> single_setting_cycle(std::size_t k, std::size_t l) {
    const double h = 1.0 / std::sqrt(2.0);
    return {{1.0, 0.0, k, l}, {0.0, 0.0, k, l}, {h, 0.0, k, l}, {h, kPi / 2.0, k, l}};
}

std::vector<AnalyzerSetting> single_full_plan(std::size_t dim) {
    if (dim == 1) {
        return {{1.0, 0.0, 0, 0}};
    }
    std::vector<AnalyzerSetting> plan;
    for (std::size_t k = 0; k < dim; ++k) {
        for (std::size_t l = k + 1; l < dim; ++l) {
            const auto cyc = single_setting_cycle(k, l);
            plan.insert(plan.end(), cyc.begin(), cyc.end());
        }
    }
    return plan;
}

std::vector<std::pair<AnalyzerSetting, AnalyzerSetting>> biphoton_setting_cycle(std::size_t m, std::size_t n,
                                                                                std::size_t p, std::size_t q) {
    std::vector<std::pair<AnalyzerSetting, AnalyzerSetting>> out;
    for (const auto &sa : single_setting_cycle(m, n)) {
        for (const auto &sb : single_setting_cycle(p, q)) {
            out.emplace_back(sa, sb);
        }
    }
    return out;
}

bool PartialDensityTensor::is_known(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    const std::size_t da = values.dim_a();
    const std::size_t db = values.dim_b();
    return known[((i * db + j) * da + k) * db + l];
}

PartialDensityMatrix reconstruct_single(const std::vector<RateRecord> &records, std::size_t dim) {
    if (dim == 0) {
        throw std::invalid_argument("reconstruct_single: dimension must be positive");
    }
    std::map<std::vector<std::size_t>, std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const AnalyzerSetting &s = records[r].setting;
        check_setting(s, dim);
        std::vector<std::size_t> key{std::min(s.first, s.second), std::max(s.first, s.second)};
        if (key[0] == key[1]) key.pop_back();
        groups[key].push_back(r);
    }
    const auto d = static_cast<Eigen::Index>(dim);
    PartialDensityMatrix out{CMatrix::Zero(d, d), Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(d, d, false),
                             0.0};
    Eigen::MatrixXd diag_count = Eigen::MatrixXd::Zero(d, 1);
    CMatrix diag_sum = CMatrix::Zero(d, 1);
    for (const auto &[modes, idx] : groups) {
        std::vector<CVector> vs;
        std::vector<double> ys;
        for (std::size_t r : idx) {
            const RateRecord &rec = records[r];
            vs.push_back(restrict(analyzer_vector(rec.setting, dim), modes));
            ys.push_back(checked_ratio(rec.converted, rec.converted + rec.transmitted, modes));
        }
        const CMatrix block = fit_hermitian(vs, ys, static_cast<Eigen::Index>(modes.size()), modes, &out.residual);
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const auto gi = static_cast<Eigen::Index>(modes[i]);
            diag_sum(gi, 0) += block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
            diag_count(gi, 0) += 1.0;
            for (std::size_t j = 0; j < modes.size(); ++j) {
                if (i == j) continue;
                const auto gj = static_cast<Eigen::Index>(modes[j]);
                out.values(gi, gj) = block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                out.known(gi, gj) = true;
            }
        }
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        if (diag_count(i, 0) > 0.0) {
            out.values(i, i) = diag_sum(i, 0) / diag_count(i, 0);
            out.known(i, i) = true;
        }
    }
    return out;
}

PartialDensityTensor reconstruct_biphoton(const std::vector<CoincidenceRecord> &records, std::size_t dim_a,
                                          std::size_t dim_b) {
    using Key = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;
    std::map<Key, std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const CoincidenceRecord &rec = records[r];
        check_setting(rec.a, dim_a);
        check_setting(rec.b, dim_b);
        std::vector<std::size_t> ka{std::min(rec.a.first, rec.a.second), std::max(rec.a.first, rec.a.second)};
        std::vector<std::size_t> kb{std::min(rec.b.first, rec.b.second), std::max(rec.b.first, rec.b.second)};
        if (ka[0] == ka[1]) ka.pop_back();
        if (kb[0] == kb[1]) kb.pop_back();
        groups[{ka, kb}].push_back(r);
    }
    PartialDensityTensor out{DensityTensor(dim_a, dim_b), std::vector<bool>(dim_a * dim_b * dim_a * dim_b, false), 0.0};
    std::vector<double> counts(out.known.size(), 0.0);
    std::vector<cplx> sums(out.known.size(), cplx{0.0, 0.0});
    for (const auto &[key, idx] : groups) {
        const auto &[ma, mb] = key;
        std::vector<std::size_t> tag = ma;
        tag.insert(tag.end(), mb.begin(), mb.end());
        std::vector<CVector> vs;
        std::vector<double> ys;
        for (std::size_t r : idx) {
            const CoincidenceRecord &rec = records[r];
            const CVector va = restrict(analyzer_vector(rec.a, dim_a), ma);
            const CVector vb = restrict(analyzer_vector(rec.b, dim_b), mb);
            CVector v(va.size() * vb.size());
            for (Eigen::Index i = 0; i < va.size(); ++i)
                for (Eigen::Index j = 0; j < vb.size(); ++j) v[i * vb.size() + j] = va[i] * vb[j];
            vs.push_back(v);
            ys.push_back(checked_ratio(rec.rates[0], rec.total(), tag));
        }
        const auto nb = mb.size();
        const CMatrix block =
            fit_hermitian(vs, ys, static_cast<Eigen::Index>(ma.size() * nb), tag, &out.residual);
        for (std::size_t r = 0; r < static_cast<std::size_t>(block.rows()); ++r) {
            for (std::size_t c = 0; c < static_cast<std::size_t>(block.cols()); ++c) {
                const std::size_t i = ma[r / nb], j = mb[r % nb], k = ma[c / nb], l = mb[c % nb];
                const std::size_t flat = ((i * dim_b + j) * dim_a + k) * dim_b + l;
                sums[flat] += block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
                counts[flat] += 1.0;
            }
        }
    }
    for (std::size_t i = 0; i < dim_a; ++i)
        for (std::size_t j = 0; j < dim_b; ++j)
            for (std::size_t k = 0; k < dim_a; ++k)
                for (std::size_t l = 0; l < dim_b; ++l) {
                    const std::size_t flat = ((i * dim_b + j) * dim_a + k) * dim_b + l;
                    if (counts[flat] > 0.0) {
                        out.values(i, j, k, l) = sums[flat] / counts[flat];
                        out.known[flat] = true;
                    }
                }
    return out;
}

SanitizeResult sanitize(const CMatrix &raw, ZeroPolicy zero_policy) {
    if (raw.rows() == 0 || raw.rows() != raw.cols()) {
        throw std::invalid_argument("sanitize: matrix must be square and nonempty");
    }
    if (!raw.allFinite()) {
        throw std::invalid_argument("sanitize: matrix has non-finite entries");
    }
    const CMatrix h = 0.5 * (raw + raw.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    RVector ev = es.eigenvalues().cwiseMax(0.0);
    const double tr = ev.sum();
    const auto n = raw.rows();
    CMatrix out;
    if (tr <= 1e-12) {
        if (zero_policy == ZeroPolicy::error) {
            throw std::invalid_argument("sanitize: no positive spectrum left after clipping");
        }
        out = CMatrix::Identity(n, n) / static_cast<double>(n);
    } else {
        ev /= tr;
        out = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
        out = 0.5 * (out + out.adjoint()).eval();
    }
    const double dist = (out - raw).norm();
    return SanitizeResult{DensityMatrix(std::move(out)), dist};
}

}  // namespace tmq
