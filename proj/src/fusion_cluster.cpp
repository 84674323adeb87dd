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
#include <sstream>
#include <stdexcept>

namespace tmq {

namespace {

using Index = std::uint64_t;

int bit(Index i, std::size_t n, std::size_t slot) { return static_cast<int>((i >> (n - 1 - slot)) & 1U); }

// Index with `slot` deleted.
Index drop_bit(Index i, std::size_t n, std::size_t slot) {
    const std::size_t shift = n - 1 - slot;
    const Index low = i & ((Index{1} << shift) - 1);
    const Index high = i >> (shift + 1);
    return (high << shift) | low;
}

void check_slot(const MultiQubitState &s, std::size_t slot) {
    if (slot >= s.n()) {
        throw std::out_of_range("qubit slot " + std::to_string(slot) + " out of range for " + std::to_string(s.n()) +
                                " qubits");
    }
}

MultiQubitState normalized(std::size_t n, CVector v) {
    v /= v.norm();
    return MultiQubitState(n, std::move(v));
}

MultiQubitState kron(const MultiQubitState &a, const MultiQubitState &b) {
    const auto nb = b.coeffs().size();
    CVector v(a.coeffs().size() * nb);
    for (Eigen::Index i = 0; i < a.coeffs().size(); ++i) {
        v.segment(i * nb, nb) = a.coeffs()[i] * b.coeffs();
    }
    return MultiQubitState(a.n() + b.n(), std::move(v));
}

double pauli_string_expectation(const MultiQubitState &s, std::size_t x_slot, const std::vector<std::size_t> &z_slots) {
    const std::size_t n = s.n();
    const CVector &c = s.coeffs();
    cplx acc{0.0, 0.0};
    for (Index i = 0; i < static_cast<Index>(c.size()); ++i) {
        const Index j = i ^ (Index{1} << (n - 1 - x_slot));
        double sign = 1.0;
        for (std::size_t z : z_slots) {
            if (bit(i, n, z)) sign = -sign;
        }
        acc += std::conj(c[static_cast<Eigen::Index>(j)]) * sign * c[static_cast<Eigen::Index>(i)];
    }
    return acc.real();
}

}  // namespace

MultiQubitState::MultiQubitState(std::size_t n, CVector coeffs) : n_(n), coeffs_(std::move(coeffs)) {
    if (n > 24) {
        throw std::invalid_argument("multi-qubit state: at most 24 qubits");
    }
    if (static_cast<Index>(coeffs_.size()) != (Index{1} << n)) {
        throw std::invalid_argument("multi-qubit state: expected 2^" + std::to_string(n) + " amplitudes, got " +
                                    std::to_string(coeffs_.size()));
    }
    const double norm = coeffs_.norm();
    if (std::abs(norm - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "multi-qubit state: norm " << norm << " differs from 1";
        throw std::invalid_argument(os.str());
    }
}

MultiQubitState MultiQubitState::product(const std::vector<CVector> &qubits) {
    MultiQubitState out(0, CVector::Ones(1));
    for (const CVector &q : qubits) {
        if (q.size() != 2) {
            throw std::invalid_argument("product: every factor must be a qubit");
        }
        out = kron(out, MultiQubitState(1, q));
    }
    return out;
}

MultiQubitState apply_local(const MultiQubitState &s, std::size_t slot, const CMatrix &u) {
    check_slot(s, slot);
    if (u.rows() != 2 || u.cols() != 2) {
        throw std::invalid_argument("apply_local: expected a 2x2 matrix");
    }
    const std::size_t n = s.n();
    const Index mask = Index{1} << (n - 1 - slot);
    CVector out = CVector::Zero(s.coeffs().size());
    for (Index i = 0; i < static_cast<Index>(out.size()); ++i) {
        const int b = bit(i, n, slot);
        const Index i0 = i & ~mask;
        const Index i1 = i | mask;
        out[static_cast<Eigen::Index>(i)] = u(b, 0) * s.coeffs()[static_cast<Eigen::Index>(i0)] +
                                            u(b, 1) * s.coeffs()[static_cast<Eigen::Index>(i1)];
    }
    return normalized(n, std::move(out));
}

MultiQubitState apply_compiled(const MultiQubitState &s, std::size_t slot, const GateSequence &seq) {
    if (seq.dim != 2) {
        throw std::invalid_argument("apply_compiled: program must act on a two-mode register");
    }
    return apply_local(s, slot, evaluate(seq).register_block());
}

std::pair<int, MultiQubitState> measure_z(const MultiQubitState &s, std::size_t slot, Rng &rng) {
    check_slot(s, slot);
    const std::size_t n = s.n();
    double p[2] = {0.0, 0.0};
    for (Index i = 0; i < static_cast<Index>(s.coeffs().size()); ++i) {
        p[bit(i, n, slot)] += std::norm(s.coeffs()[static_cast<Eigen::Index>(i)]);
    }
    const int o = static_cast<int>(sample_index(std::span<const double>(p, 2), rng));
    CVector rest = CVector::Zero(static_cast<Eigen::Index>(Index{1} << (n - 1)));
    for (Index i = 0; i < static_cast<Index>(s.coeffs().size()); ++i) {
        if (bit(i, n, slot) == o) {
            rest[static_cast<Eigen::Index>(drop_bit(i, n, slot))] = s.coeffs()[static_cast<Eigen::Index>(i)];
        }
    }
    return {o, normalized(n - 1, std::move(rest))};
}

std::pair<CMatrix, CMatrix> fusion_kraus() {
    const double h = 1.0 / std::sqrt(2.0);
    CMatrix o1 = CMatrix::Zero(2, 4);
    CMatrix o2 = CMatrix::Zero(2, 4);
    o1(0, 0) = h;
    o1(1, 3) = -h;
    o2(0, 0) = h;
    o2(1, 3) = h;
    return {o1, o2};
}

std::string detector_name(Detector d) {
    switch (d) {
        case Detector::d1: return "D1";
        case Detector::d2: return "D2";
        case Detector::failure: return "failure";
    }
    return "?";
}

std::array<FusionOutcome, 3> apply_fusion(const MultiQubitState &s, std::size_t slot_a, std::size_t slot_b) {
    check_slot(s, slot_a);
    check_slot(s, slot_b);
    if (slot_a == slot_b) {
        throw std::invalid_argument("apply_fusion: slots must be distinct");
    }
    const std::size_t n = s.n();
    const auto [o1, o2] = fusion_kraus();
    const Eigen::Index out_size = static_cast<Eigen::Index>(Index{1} << (n - 1));
    CVector f1 = CVector::Zero(out_size);
    CVector f2 = CVector::Zero(out_size);
    CVector odd = CVector::Zero(s.coeffs().size());
    for (Index i = 0; i < static_cast<Index>(s.coeffs().size()); ++i) {
        const cplx amp = s.coeffs()[static_cast<Eigen::Index>(i)];
        const int a = bit(i, n, slot_a);
        const int b = bit(i, n, slot_b);
        // Dropping slot a leaves slot b's bit as the fused qubit.
        const auto j = static_cast<Eigen::Index>(drop_bit(i, n, slot_a));
        const int col = 2 * a + b;
        f1[j] += o1(b, col) * amp;
        f2[j] += o2(b, col) * amp;
        if (a != b) {
            odd[static_cast<Eigen::Index>(i)] = amp;
        }
    }
    const double p1 = f1.squaredNorm();
    const double p2 = f2.squaredNorm();
    const double pf = odd.squaredNorm();
    auto make = [&](Detector d, std::size_t m, CVector v, double p) {
        FusionOutcome o{d, std::nullopt, p};
        if (p > 1e-300) {
            o.post_state = normalized(m, std::move(v));
        }
        return o;
    };
    return {make(Detector::d1, n - 1, std::move(f1), p1), make(Detector::d2, n - 1, std::move(f2), p2),
            make(Detector::failure, n, std::move(odd), pf)};
}

FusionOutcome apply_fusion(const MultiQubitState &s, std::size_t slot_a, std::size_t slot_b, Rng &rng) {
    auto dist = apply_fusion(s, slot_a, slot_b);
    const double p[3] = {dist[0].probability, dist[1].probability, dist[2].probability};
    return std::move(dist[sample_index(std::span<const double>(p, 3), rng)]);
}

FailurePolicy parse_failure_policy(std::string_view name) {
    if (name == "truncate") return FailurePolicy::truncate;
    if (name == "keep_chain") return FailurePolicy::keep_chain;
    throw std::invalid_argument("unknown failure policy '" + std::string(name) + "' (expected truncate, keep_chain)");
}

std::string failure_policy_name(FailurePolicy p) {
    return p == FailurePolicy::truncate ? "truncate" : "keep_chain";
}

MultiQubitState bell_pair() {
    CVector v = CVector::Zero(4);
    v[1] = v[2] = 1.0 / std::sqrt(2.0);
    return MultiQubitState(2, std::move(v));
}

MultiQubitState cluster_pair() {
    MultiQubitState s = apply_compiled(bell_pair(), 0, compile_gate(GateName::X1));
    return apply_compiled(s, 1, compile_gate(GateName::H));
}

ClusterGrowth grow_linear_cluster(std::size_t target_n, std::optional<std::uint64_t> bell_supply, Rng &rng,
                                  FailurePolicy policy) {
    if (target_n < 2) {
        throw std::invalid_argument("grow_linear_cluster: target length must be at least 2");
    }
    const GateSequence z = compile_gate(GateName::Z);
    ResourceReport rep;
    std::optional<MultiQubitState> chain;
    auto take_pair = [&]() {
        if (bell_supply && rep.pairs_consumed >= *bell_supply) {
            throw std::runtime_error("grow_linear_cluster: Bell pair supply exhausted after " +
                                     std::to_string(rep.pairs_consumed) + " pairs");
        }
        ++rep.pairs_consumed;
        return cluster_pair();
    };
    while (!chain || chain->n() < target_n) {
        MultiQubitState pair = take_pair();
        if (!chain) {
            chain = std::move(pair);
            continue;
        }
        const std::size_t n = chain->n();
        ++rep.attempts;
        FusionOutcome out = apply_fusion(kron(*chain, pair), n - 1, n, rng);
        if (out.detector != Detector::failure) {
            ++rep.successes;
            MultiQubitState grown = std::move(*out.post_state);
            if (out.detector == Detector::d1) {
                grown = apply_compiled(grown, n - 1, z);
            }
            chain = std::move(grown);
            continue;
        }
        ++rep.failures;
        if (policy == FailurePolicy::keep_chain) {
            continue;
        }
        MultiQubitState s = std::move(*out.post_state);
        auto [end_bit, rest] = measure_z(s, n - 1, rng);
        rest = measure_z(rest, n, rng).second;
        rest = measure_z(rest, n - 1, rng).second;
        if (rest.n() == 0) {
            chain.reset();
            continue;
        }
        if (end_bit == 1) {
            rest = apply_compiled(rest, rest.n() - 1, z);
        }
        chain = std::move(rest);
    }
    return ClusterGrowth{std::move(*chain), rep};
}

ClusterReport verify_cluster(const MultiQubitState &s, std::size_t chain_length) {
    if (s.n() != chain_length) {
        throw std::invalid_argument("verify_cluster: state has " + std::to_string(s.n()) + " qubits, expected " +
                                    std::to_string(chain_length));
    }
    ClusterReport rep{{}, true};
    for (std::size_t i = 0; i < chain_length; ++i) {
        std::vector<std::size_t> nbr;
        if (i > 0) nbr.push_back(i - 1);
        if (i + 1 < chain_length) nbr.push_back(i + 1);
        const double k = pauli_string_expectation(s, i, nbr);
        rep.stabilizers.push_back(k);
        rep.pass = rep.pass && k >= 1.0 - 1e-10;
    }
    return rep;
}

MultiQubitState linear_cluster(std::size_t n) {
    const Index size = Index{1} << n;
    CVector v(static_cast<Eigen::Index>(size));
    const double amp = 1.0 / std::sqrt(static_cast<double>(size));
    for (Index i = 0; i < size; ++i) {
        int parity = 0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            parity ^= bit(i, n, k) & bit(i, n, k + 1);
        }
        v[static_cast<Eigen::Index>(i)] = parity ? -amp : amp;
    }
    return MultiQubitState(n, std::move(v));
}

}  // namespace tmq
