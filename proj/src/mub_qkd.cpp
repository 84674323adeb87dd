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

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "tmq/qpg_core.hpp"

namespace tmq {

namespace {

CMatrix pauli(char p) {
    CMatrix m(2, 2);
    switch (p) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -kI, kI, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::logic_error("bad Pauli label");
    }
    return m;
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
}

CMatrix two_qubit(const char *label) { return kron(pauli(label[0]), pauli(label[1])); }

void fix_column_phases(CMatrix &b) {
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        for (Eigen::Index r = 0; r < b.rows(); ++r) {
            const double mag = std::abs(b(r, c));
            if (mag > 1e-9) {
                b.col(c) *= std::conj(b(r, c)) / mag;
                b(r, c) = mag;
                break;
            }
        }
    }
}

std::vector<CMatrix> qubit_bases() {
    const double h = 1.0 / std::sqrt(2.0);
    CMatrix z = CMatrix::Identity(2, 2);
    CMatrix x(2, 2);
    x << h, h, h, -h;
    CMatrix y(2, 2);
    y << h, h, h * kI, -h * kI;
    return {z, x, y};
}

std::vector<CMatrix> odd_prime_bases(std::size_t p) {
    std::vector<CMatrix> out{CMatrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p))};
    const double norm = 1.0 / std::sqrt(static_cast<double>(p));
    for (std::size_t a = 0; a < p; ++a) {
        CMatrix b(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
        for (std::size_t col = 0; col < p; ++col) {
            for (std::size_t k = 0; k < p; ++k) {
                const std::size_t e = (a * k * k + col * k) % p;
                b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(col)) =
                    norm * std::polar(1.0, 2.0 * kPi * static_cast<double>(e) / static_cast<double>(p));
            }
        }
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<CMatrix> two_qubit_bases() {
    static const std::array<std::array<const char *, 2>, 4> classes{
        {{"XI", "IX"}, {"YI", "IY"}, {"XZ", "YX"}, {"YZ", "XY"}}};
    std::vector<CMatrix> out{CMatrix::Identity(4, 4)};
    for (const auto &cls : classes) {
        const CMatrix h = two_qubit(cls[0]) + 2.0 * two_qubit(cls[1]);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        CMatrix b = es.eigenvectors();
        fix_column_phases(b);
        out.push_back(std::move(b));
    }
    return out;
}

std::size_t sample_outcome(const std::vector<double> &probs, Rng &rng) {
    return sample_index(std::span<const double>(probs), rng);
}

}  // namespace

double mub_deviation(const MubSet &set) {
    const auto d = static_cast<Eigen::Index>(set.dim);
    double worst = 0.0;
    for (const CMatrix &b : set.bases) {
        worst = std::max(worst, (b.adjoint() * b - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff());
    }
    const double target = 1.0 / static_cast<double>(set.dim);
    for (std::size_t i = 0; i < set.bases.size(); ++i) {
        for (std::size_t j = i + 1; j < set.bases.size(); ++j) {
            const CMatrix o = set.bases[i].adjoint() * set.bases[j];
            worst = std::max(worst, (o.cwiseAbs2().array() - target).abs().maxCoeff());
        }
    }
    return worst;
}

MubSet mub_bases(std::size_t d, std::size_t count) {
    std::vector<CMatrix> all;
    switch (d) {
        case 2: all = qubit_bases(); break;
        case 3:
        case 5: all = odd_prime_bases(d); break;
        case 4: all = two_qubit_bases(); break;
        default:
            throw std::invalid_argument("mub_bases: unsupported dimension " + std::to_string(d) +
                                        " (supported: 2, 3, 4, 5)");
    }
    if (count == 0 || count > all.size()) {
        throw std::invalid_argument("mub_bases: count must be in 1.." + std::to_string(all.size()) + " for d = " +
                                    std::to_string(d));
    }
    all.resize(count);
    MubSet set{d, std::move(all)};
    const double dev = mub_deviation(set);
    if (dev > 1e-12) {
        std::ostringstream os;
        os << "mub_bases: construction failed verification (deviation " << dev << ")";
        throw std::logic_error(os.str());
    }
    return set;
}

std::vector<double> cascade_probabilities(const RegisterState &state, const CMatrix &basis) {
    const auto d = static_cast<Eigen::Index>(state.dim());
    if (basis.rows() != d || basis.cols() != d) {
        throw std::invalid_argument("cascade_probabilities: basis shape does not match the register");
    }
    std::vector<CVector> targets;
    for (Eigen::Index k = 0; k + 1 < d; ++k) {
        targets.emplace_back(basis.col(k));
    }
    const DropResult r = drop_cascade(state, std::span<const CVector>(targets));
    std::vector<double> p;
    for (const DropSlot &s : r.slots) {
        p.push_back(s.power);
    }
    p.push_back(r.residual.squaredNorm());
    return p;
}

std::size_t bob_cascade_measure(const RegisterState &state, const CMatrix &basis, Rng &rng) {
    return sample_outcome(cascade_probabilities(state, basis), rng);
}

Eavesdropper parse_eavesdropper(std::string_view name) {
    if (name == "none") return Eavesdropper::none;
    if (name == "intercept_resend") return Eavesdropper::intercept_resend;
    throw std::invalid_argument("unknown eavesdropper '" + std::string(name) + "' (expected none, intercept_resend)");
}

std::string eavesdropper_name(Eavesdropper e) {
    return e == Eavesdropper::none ? "none" : "intercept_resend";
}

QkdRecord bb84_run(std::size_t d, std::uint64_t n_rounds, std::size_t n_bases, Eavesdropper eve,
                   std::uint64_t seed, bool keep_log) {
    if (n_rounds == 0) {
        throw std::invalid_argument("bb84_run: n_rounds must be at least 1");
    }
    const MubSet set = mub_bases(d, n_bases);
    QkdRecord rec{d, n_bases, eve, seed, n_rounds, 0, 0, 0.0, {}};
    for (std::uint64_t r = 0; r < n_rounds; ++r) {
        Rng rng = make_stream(seed, "qkd", r);
        std::uniform_int_distribution<std::size_t> pick_basis(0, n_bases - 1);
        std::uniform_int_distribution<std::size_t> pick_symbol(0, d - 1);
        RoundLog log{};
        log.alice_basis = pick_basis(rng);
        log.alice_symbol = pick_symbol(rng);
        CVector sent = set.bases[log.alice_basis].col(static_cast<Eigen::Index>(log.alice_symbol));
        if (eve == Eavesdropper::intercept_resend) {
            const std::size_t eb = pick_basis(rng);
            const std::size_t eo = bob_cascade_measure(RegisterState(d, sent), set.bases[eb], rng);
            log.eve_basis = eb;
            log.eve_outcome = eo;
            sent = set.bases[eb].col(static_cast<Eigen::Index>(eo));
        }
        log.bob_basis = pick_basis(rng);
        log.bob_outcome = bob_cascade_measure(RegisterState(d, sent), set.bases[log.bob_basis], rng);
        if (log.bob_basis == log.alice_basis) {
            ++rec.sifted_length;
            if (log.bob_outcome != log.alice_symbol) {
                ++rec.errors;
            }
        }
        if (keep_log) {
            rec.log.push_back(log);
        }
    }
    rec.qber = rec.sifted_length == 0 ? 0.0
                                      : static_cast<double>(rec.errors) / static_cast<double>(rec.sifted_length);
    return rec;
}

double qber_theory(std::size_t d, std::size_t n_bases, Eavesdropper strategy) {
    if (strategy != Eavesdropper::intercept_resend) {
        throw std::invalid_argument("qber_theory: only intercept_resend has an analytic rate");
    }
    if (d < 2 || n_bases < 1) {
        throw std::invalid_argument("qber_theory: need d >= 2 and at least one basis");
    }
    const double m = static_cast<double>(n_bases);
    const double dd = static_cast<double>(d);
    return (1.0 - 1.0 / m) * (dd - 1.0) / dd;
}

double qber_enumerate(std::size_t d, std::size_t n_bases, Eavesdropper strategy) {
    const MubSet set = mub_bases(d, n_bases);
    const auto born = [](const CVector &psi, const CMatrix &basis) {
        return (basis.adjoint() * psi).cwiseAbs2().eval();
    };
    double err = 0.0;
    double total = 0.0;
    for (std::size_t a = 0; a < n_bases; ++a) {
        for (std::size_t s = 0; s < d; ++s) {
            const CVector psi = set.bases[a].col(static_cast<Eigen::Index>(s));
            std::vector<std::pair<double, CVector>> arriving;
            if (strategy == Eavesdropper::none) {
                arriving.emplace_back(1.0, psi);
            } else {
                for (std::size_t e = 0; e < n_bases; ++e) {
                    const RVector pe = born(psi, set.bases[e]);
                    for (Eigen::Index o = 0; o < pe.size(); ++o) {
                        arriving.emplace_back(pe[o] / static_cast<double>(n_bases), set.bases[e].col(o));
                    }
                }
            }
            for (const auto &[w, phi] : arriving) {
                const RVector pb = born(phi, set.bases[a]);
                for (Eigen::Index o = 0; o < pb.size(); ++o) {
                    const double p = w * pb[o];
                    total += p;
                    if (static_cast<std::size_t>(o) != s) {
                        err += p;
                    }
                }
            }
        }
    }
    return err / total;
}

}  // namespace tmq
