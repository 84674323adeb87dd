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

#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tmq/fusion_cluster.hpp"
#include "tmq/gate_compiler.hpp"
#include "tmq/mub_qkd.hpp"
#include "tmq/pdc_model.hpp"
#include "tmq/qpg_core.hpp"
#include "tmq/tm_basis.hpp"
#include "tmq/tm_states.hpp"
#include "tmq/tomography.hpp"
#include "tmq_cli.hpp"

namespace py = pybind11;
using namespace tmq;

namespace {

CMatrix mode_columns(const std::vector<TemporalMode> &modes) {
    if (modes.empty()) return CMatrix();
    CMatrix m(modes.front().amplitude().size(), static_cast<Eigen::Index>(modes.size()));
    for (std::size_t k = 0; k < modes.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = modes[k].amplitude();
    return m;
}

py::dict schmidt_dict(const SchmidtDecomposition &sd, const FrequencyGrid &g) {
    py::dict d;
    d["spectrum"] = RVector(sd.spectrum);
    d["weights"] = RVector(sd.weights);
    d["truncation"] = sd.truncation;
    d["signal_modes"] = mode_columns(sd.signal_modes);
    d["idler_modes"] = mode_columns(sd.idler_modes);
    d["frequencies"] = g.points();
    return d;
}

py::dict qkd_dict(const QkdRecord &r) {
    py::dict d;
    d["dim"] = r.dim;
    d["n_bases"] = r.n_bases;
    d["eve"] = eavesdropper_name(r.eve);
    d["seed"] = r.seed;
    d["n_rounds"] = r.n_rounds;
    d["sifted_length"] = r.sifted_length;
    d["errors"] = r.errors;
    d["qber"] = r.qber;
    return d;
}

py::dict outcome_dict(const FusionOutcome &o) {
    py::dict d;
    d["detector"] = detector_name(o.detector);
    d["probability"] = o.probability;
    if (o.post_state) {
        d["state"] = CVector(o.post_state->coeffs());
    } else {
        d["state"] = py::none();
    }
    return d;
}

py::list sequence_list(const GateSequence &seq) {
    py::list out;
    for (const Primitive &p : seq.primitives) {
        py::dict d;
        switch (p.kind) {
            case PrimitiveKind::q100: d["kind"] = "q100"; break;
            case PrimitiveKind::q50: d["kind"] = "q50"; break;
            case PrimitiveKind::green_phase: d["kind"] = "green_phase"; break;
        }
        if (p.kind == PrimitiveKind::green_phase) {
            d["phase"] = p.phase;
        } else {
            d["target"] = CVector(p.target);
        }
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_tmq, m) {
    m.doc() = "Temporal-mode quantum information toolkit";

    py::register_exception<SupportError>(m, "SupportError", PyExc_ValueError);
    py::register_exception<TomographyError>(m, "TomographyError", PyExc_RuntimeError);

    m.def("hermite_gaussian",
          [](int order, double center, double width, double grid_center, double span, std::size_t n_points) {
              return CVector(hermite_gaussian(order, center, width, make_grid(grid_center, span, n_points)).amplitude());
          },
          py::arg("order"), py::arg("center"), py::arg("width"), py::arg("grid_center"), py::arg("span"),
          py::arg("n_points"));

    m.def("schmidt_decompose",
          [](int pump_order, double sigma, double span, std::size_t n_points, const std::string &model,
             double pm_width, std::optional<std::size_t> truncation) {
              const FrequencyGrid g = make_grid(0.0, span, n_points);
              const PhasematchSpec pm{model == "sinc" ? PhasematchModel::sinc : PhasematchModel::gaussian, pm_width,
                                      std::nullopt};
              SchmidtOptions opt;
              opt.truncation = truncation;
              if (pm.model == PhasematchModel::gaussian && pm_width == sigma) {
                  opt.reference_width = matched_schmidt_width(sigma);
              }
              return schmidt_dict(
                  schmidt_decompose(jsa(pump_envelope({pump_order, sigma, 0.0}, g, g), phasematching(pm, g, g)), opt),
                  g);
          },
          py::arg("pump_order") = 0, py::arg("sigma") = 1.0, py::arg("span") = 24.0, py::arg("n_points") = 256,
          py::arg("model") = "gaussian", py::arg("pm_width") = 1.0, py::arg("truncation") = py::none());
    m.def("analytic_weights", &analytic_weights, py::arg("order"));
    m.def("pair_purity", [](const std::vector<double> &w) { return purity(w); }, py::arg("weights"));
    m.def("schmidt_number", [](const std::vector<double> &w) { return schmidt_number(w); }, py::arg("weights"));

    m.def("herald_unfiltered",
          [](const std::vector<double> &w) { return CMatrix(herald_unfiltered(pdc_state(w)).matrix()); },
          py::arg("weights"));
    m.def("herald_qpg",
          [](const std::vector<double> &w, std::size_t target, double efficiency) {
              const HeraldResult r = herald_qpg(pdc_state(w), target, efficiency);
              return py::make_tuple(CMatrix(r.state.matrix()), r.rate);
          },
          py::arg("weights"), py::arg("target"), py::arg("efficiency") = 1.0);
    m.def("purity", [](const CMatrix &rho) { return purity(DensityMatrix(rho)); }, py::arg("rho"));

    m.def("qpg_operator",
          [](const CVector &target, double theta, std::optional<std::vector<double>> residuals) {
              return CMatrix(qpg_operator(QpgSpec{target, theta, std::move(residuals)}).matrix());
          },
          py::arg("target"), py::arg("theta"), py::arg("residual_thetas") = py::none());
    m.def("selectivity", [](const std::vector<double> &thetas, std::size_t target) { return selectivity(thetas, target); },
          py::arg("thetas"), py::arg("target"));
    m.def("two_stage", [](const CVector &target, double phase) { return CMatrix(two_stage(target, phase).matrix()); },
          py::arg("target"), py::arg("phase"));

    m.def("compile_gate",
          [](const std::string &name, double phi) {
              const GateSequence seq = compile_gate(parse_gate_name(name), phi);
              return py::make_tuple(sequence_list(seq), CMatrix(evaluate(seq).register_block()));
          },
          py::arg("name"), py::arg("phi") = 0.0);
    m.def("gate_target", [](const std::string &name, double phi) { return gate_target(parse_gate_name(name), phi); },
          py::arg("name"), py::arg("phi") = 0.0);
    m.def("compile_unitary",
          [](const CMatrix &u) {
              const GateSequence seq = compile_qudit_unitary(u);
              return py::make_tuple(sequence_list(seq), CMatrix(evaluate(seq).register_block()));
          },
          py::arg("u"));
    m.def("phase_distance", &phase_distance, py::arg("u"), py::arg("v"));

    m.def("single_rate",
          [](const CMatrix &rho, double zeta, double phi, std::size_t first, std::size_t second) {
              return simulate_single(DensityMatrix(rho), {zeta, phi, first, second}).ratio();
          },
          py::arg("rho"), py::arg("zeta"), py::arg("phi"), py::arg("first"), py::arg("second"));
    m.def("tomography_roundtrip",
          [](const CMatrix &rho, std::optional<std::uint64_t> shots, std::uint64_t seed) {
              const DensityMatrix state(rho);
              const auto plan = single_full_plan(static_cast<std::size_t>(rho.rows()));
              std::vector<RateRecord> recs;
              for (std::size_t k = 0; k < plan.size(); ++k) {
                  Rng r = make_stream(seed, "tomo", k);
                  recs.push_back(simulate_single(state, plan[k], shots, shots ? &r : nullptr));
              }
              return CMatrix(reconstruct_single(recs, static_cast<std::size_t>(rho.rows())).values);
          },
          py::arg("rho"), py::arg("shots") = py::none(), py::arg("seed") = 0);
    m.def("sanitize",
          [](const CMatrix &raw) {
              const SanitizeResult s = sanitize(raw, ZeroPolicy::error);
              return py::make_tuple(CMatrix(s.rho.matrix()), s.distance);
          },
          py::arg("raw"));

    m.def("mub_bases", [](std::size_t d, std::size_t count) { return mub_bases(d, count).bases; }, py::arg("d"),
          py::arg("count"));
    m.def("bb84",
          [](std::size_t d, std::uint64_t n_rounds, std::size_t n_bases, const std::string &eve, std::uint64_t seed) {
              return qkd_dict(bb84_run(d, n_rounds, n_bases, parse_eavesdropper(eve), seed));
          },
          py::arg("d"), py::arg("n_rounds"), py::arg("n_bases"), py::arg("eve") = "none", py::arg("seed") = 0);
    m.def("qber_theory", [](std::size_t d, std::size_t m) { return qber_theory(d, m, Eavesdropper::intercept_resend); },
          py::arg("d"), py::arg("n_bases"));

    m.def("fuse",
          [](const CVector &coeffs, std::size_t n, std::size_t a, std::size_t b) {
              py::list out;
              for (const auto &o : apply_fusion(MultiQubitState(n, coeffs), a, b)) out.append(outcome_dict(o));
              return out;
          },
          py::arg("coeffs"), py::arg("n"), py::arg("slot_a"), py::arg("slot_b"));
    m.def("grow_cluster",
          [](std::size_t target_n, std::uint64_t seed, const std::string &policy) {
              Rng rng = make_stream(seed, "cluster");
              const ClusterGrowth g = grow_linear_cluster(target_n, std::nullopt, rng, parse_failure_policy(policy));
              py::dict d;
              d["state"] = CVector(g.state.coeffs());
              d["pairs_consumed"] = g.report.pairs_consumed;
              d["attempts"] = g.report.attempts;
              d["failures"] = g.report.failures;
              d["stabilizers"] = verify_cluster(g.state, target_n).stabilizers;
              return d;
          },
          py::arg("target_n"), py::arg("seed") = 0, py::arg("policy") = "truncate");
    m.def("cluster_stabilizers",
          [](const CVector &coeffs, std::size_t n) { return verify_cluster(MultiQubitState(n, coeffs), n).stabilizers; },
          py::arg("coeffs"), py::arg("n"));

    m.def("run_cli",
          [](const std::vector<std::string> &args) {
              std::ostringstream out, err;
              const int code = cli::run_cli(args, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"));
    m.attr("__version__") = cli::kVersion;
}
