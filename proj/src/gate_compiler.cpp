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

#include "tmq/gate_compiler.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tmq {

namespace {

CVector unit(std::size_t dim, std::size_t k) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(k)] = 1.0;
    return v;
}

double wrap_phase(double phi) {
    double w = std::fmod(phi, 2.0 * kPi);
    if (w < 0.0) {
        w += 2.0 * kPi;
    }
    if (w >= 2.0 * kPi) {
        w = 0.0;
    }
    return w;
}

bool negligible_phase(double phi) {
    const double w = wrap_phase(phi);
    return w < 1e-14 || 2.0 * kPi - w < 1e-14;
}

// exp(i a) on mode j: Q^(1.0)_j, green phase (a + pi), Q^(1.0)_j.
void push_mode_phase(GateSequence &seq, std::size_t j, double a) {
    if (negligible_phase(a)) {
        return;
    }
    seq.primitives.push_back(Primitive::full(unit(seq.dim, j)));
    seq.primitives.push_back(Primitive::phase_shift(a + kPi));
    seq.primitives.push_back(Primitive::full(unit(seq.dim, j)));
}

// Realizes the 2x2 unitary v on modes (j, k) as D_L K(phi) D_R, where
//   K(phi) = Q100_j, Q50_k, G(phi), Q50_k, Q100_j  acts as  -e^{i phi/2} [[i s, c], [c, i s]]
// with c = cos(phi/2), s = sin(phi/2), D_L = diag(e^{ia}, e^{ib}), D_R = diag(e^{ig}, 1).
void push_two_level(GateSequence &seq, std::size_t j, std::size_t k, const Eigen::Matrix2cd &v) {
    const double c = std::min(1.0, std::abs(v(0, 1)));
    if (c < 1e-14) {
        push_mode_phase(seq, j, std::arg(v(0, 0)));
        push_mode_phase(seq, k, std::arg(v(1, 1)));
        return;
    }
    const double half = std::acos(c);
    const double phi = 2.0 * half;
    const double s = std::sin(half);
    const cplx pre = -std::polar(1.0, half);
    const double arg_diag = std::arg(pre * kI);
    const double arg_off = std::arg(pre);
    double a = std::arg(v(0, 1)) - arg_off;
    double b = 0.0;
    double g = 0.0;
    if (s > 1e-14) {
        b = std::arg(v(1, 1)) - arg_diag;
        g = std::arg(v(0, 0)) - a - arg_diag;
    } else {
        b = std::arg(v(1, 0)) - arg_off;
    }
    push_mode_phase(seq, j, g);
    seq.primitives.push_back(Primitive::full(unit(seq.dim, j)));
    seq.primitives.push_back(Primitive::half(unit(seq.dim, k)));
    if (!negligible_phase(phi)) {
        seq.primitives.push_back(Primitive::phase_shift(phi));
    }
    seq.primitives.push_back(Primitive::half(unit(seq.dim, k)));
    seq.primitives.push_back(Primitive::full(unit(seq.dim, j)));
    push_mode_phase(seq, j, a);
    push_mode_phase(seq, k, b);
}

}  // namespace

Primitive Primitive::full(CVector target) {
    return Primitive{PrimitiveKind::q100, std::move(target), 0.0};
}

Primitive Primitive::half(CVector target) {
    return Primitive{PrimitiveKind::q50, std::move(target), 0.0};
}

Primitive Primitive::phase_shift(double phi) {
    return Primitive{PrimitiveKind::green_phase, CVector(), wrap_phase(phi)};
}

RegisterUnitary Primitive::unitary(std::size_t dim) const {
    switch (kind) {
        case PrimitiveKind::q100:
        case PrimitiveKind::q50:
            if (static_cast<std::size_t>(target.size()) != dim) {
                throw std::invalid_argument("primitive target has dimension " + std::to_string(target.size()) +
                                            ", sequence has " + std::to_string(dim));
            }
            return qpg_operator(QpgSpec{target, kind == PrimitiveKind::q100 ? kPi / 2.0 : kPi / 4.0, std::nullopt});
        case PrimitiveKind::green_phase:
            return green_phase(dim, phase);
    }
    throw std::logic_error("unknown primitive kind");
}

RegisterUnitary evaluate(const GateSequence &seq) {
    const auto n = static_cast<Eigen::Index>(seq.dim + 1);
    CMatrix u = CMatrix::Identity(n, n);
    for (const Primitive &p : seq.primitives) {
        u = p.unitary(seq.dim).matrix() * u;
    }
    return RegisterUnitary(seq.dim, std::move(u), 1);
}

GateName parse_gate_name(std::string_view name) {
    if (name == "H") return GateName::H;
    if (name == "X1" || name == "X") return GateName::X1;
    if (name == "X2") return GateName::X2;
    if (name == "Y1" || name == "Y") return GateName::Y1;
    if (name == "Y2") return GateName::Y2;
    if (name == "Z") return GateName::Z;
    if (name == "phase") return GateName::phase;
    throw std::invalid_argument("unknown gate name '" + std::string(name) + "' (expected H, X1, X2, Y1, Y2, Z, phase)");
}

std::string gate_name(GateName g) {
    switch (g) {
        case GateName::H: return "H";
        case GateName::X1: return "X1";
        case GateName::X2: return "X2";
        case GateName::Y1: return "Y1";
        case GateName::Y2: return "Y2";
        case GateName::Z: return "Z";
        case GateName::phase: return "phase";
    }
    return "?";
}

GateSequence compile_gate(GateName gate, double phi) {
    const CVector a0 = unit(2, 0);
    const CVector a1 = unit(2, 1);
    GateSequence seq{2, {}};
    auto &p = seq.primitives;
    switch (gate) {
        case GateName::H: {
            // Q_w^2 = 1 - 2|w><w| on the register; with w at pi/8 that is -H.
            CVector w(2);
            w << std::cos(kPi / 8.0), std::sin(kPi / 8.0);
            p = {Primitive::full(w), Primitive::full(w)};
            break;
        }
        case GateName::X1:
            p = {Primitive::full(a0), Primitive::full(a1), Primitive::full(a0)};
            break;
        case GateName::X2:
            p = {Primitive::full(a1), Primitive::full(a0), Primitive::full(a1)};
            break;
        case GateName::Y1:
        case GateName::Y2: {
            // Y = i X Z: Z first, then X.
            p = compile_gate(GateName::Z).primitives;
            const auto x = compile_gate(gate == GateName::Y1 ? GateName::X1 : GateName::X2).primitives;
            p.insert(p.end(), x.begin(), x.end());
            break;
        }
        case GateName::Z:
            p = {Primitive::full(a1), Primitive::full(a1)};
            break;
        case GateName::phase:
            p = {Primitive::full(a1), Primitive::phase_shift(phi + kPi), Primitive::full(a1)};
            break;
    }
    return seq;
}

CMatrix gate_target(GateName gate, double phi) {
    CMatrix m(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    switch (gate) {
        case GateName::H:
            m << r, r, r, -r;
            break;
        case GateName::X1:
        case GateName::X2:
            m << 0, 1, 1, 0;
            break;
        case GateName::Y1:
        case GateName::Y2:
            m << 0, -kI, kI, 0;
            break;
        case GateName::Z:
            m << 1, 0, 0, -1;
            break;
        case GateName::phase:
            m << 1, 0, 0, std::polar(1.0, phi);
            break;
    }
    return m;
}

GateSequence compile_qudit_unitary(const CMatrix &u, double tol) {
    if (u.rows() == 0 || u.rows() != u.cols()) {
        throw std::invalid_argument("compile_qudit_unitary: matrix must be square");
    }
    const double r = unitarity_residual(u);
    if (r > tol) {
        std::ostringstream os;
        os << "compile_qudit_unitary: input is not unitary (max |U^dagger U - 1| = " << r << ")";
        throw std::invalid_argument(os.str());
    }
    const auto d = u.rows();
    struct Factor {
        Eigen::Index row_a;
        Eigen::Index row_b;
        Eigen::Matrix2cd g;
    };
    std::vector<Factor> factors;
    CMatrix w = u;
    for (Eigen::Index c = 0; c + 1 < d; ++c) {
        for (Eigen::Index row = d - 1; row > c; --row) {
            const cplx a = w(c, c);
            const cplx b = w(row, c);
            if (std::abs(b) < 1e-15) {
                continue;
            }
            const double n = std::hypot(std::abs(a), std::abs(b));
            Eigen::Matrix2cd g;
            g << std::conj(a) / n, std::conj(b) / n, -b / n, a / n;
            for (Eigen::Index col = 0; col < d; ++col) {
                const cplx x = w(c, col);
                const cplx y = w(row, col);
                w(c, col) = g(0, 0) * x + g(0, 1) * y;
                w(row, col) = g(1, 0) * x + g(1, 1) * y;
            }
            factors.push_back({c, row, g});
        }
    }
    // Now w is diagonal and u = G_1^dagger ... G_N^dagger w; applied right to left.
    GateSequence seq{static_cast<std::size_t>(d), {}};
    for (Eigen::Index k = 0; k < d; ++k) {
        push_mode_phase(seq, static_cast<std::size_t>(k), std::arg(w(k, k)));
    }
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        push_two_level(seq, static_cast<std::size_t>(it->row_a), static_cast<std::size_t>(it->row_b),
                       it->g.adjoint());
    }
    return seq;
}

double phase_distance(const CMatrix &u, const CMatrix &v) {
    if (u.rows() != v.rows() || u.cols() != v.cols()) {
        throw std::invalid_argument("phase_distance: shape mismatch");
    }
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    const double peak = v.cwiseAbs().maxCoeff(&r, &c);
    cplx ph{1.0, 0.0};
    if (peak > 0.0 && std::abs(u(r, c)) > 0.0) {
        ph = u(r, c) / v(r, c);
        ph /= std::abs(ph);
    }
    return (u - ph * v).cwiseAbs().maxCoeff();
}

bool equal_up_to_phase(const CMatrix &u, const CMatrix &v, double tol) {
    return phase_distance(u, v) <= tol;
}

double green_leakage(const RegisterUnitary &u) {
    const auto d = static_cast<Eigen::Index>(u.dim());
    return u.matrix().block(d, 0, u.matrix().rows() - d, d).cwiseAbs().maxCoeff();
}

std::vector<GateCheck> verify_all_gates(double phi) {
    std::vector<GateCheck> out;
    for (GateName g : {GateName::H, GateName::X1, GateName::X2, GateName::Y1, GateName::Y2, GateName::Z,
                       GateName::phase}) {
        const GateSequence seq = compile_gate(g, phi);
        const RegisterUnitary u = evaluate(seq);
        out.push_back(GateCheck{gate_name(g), seq.primitives.size(),
                                phase_distance(u.register_block(), gate_target(g, phi)), green_leakage(u)});
    }
    return out;
}

}  // namespace tmq
