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

#include "tmq_cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/QR>
#include <openssl/evp.h>

#include "tmq/fusion_cluster.hpp"
#include "tmq/gate_compiler.hpp"
#include "tmq/mub_qkd.hpp"
#include "tmq/pdc_model.hpp"
#include "tmq/qpg_core.hpp"
#include "tmq/rng.hpp"
#include "tmq/serialize.hpp"
#include "tmq/tm_basis.hpp"
#include "tmq/tm_states.hpp"
#include "tmq/tomography.hpp"

namespace tmq::cli {

namespace {

namespace fs = std::filesystem;

struct ConfigError : std::runtime_error {
    ConfigError(std::string p, const std::string &what) : std::runtime_error(what), path(std::move(p)) {}
    std::string path;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Read-only view of one config object; every key must be declared by the handler.
class Node {
   public:
    Node(const Json *j, std::string path) : j_(j), path_(std::move(path)) {
        if (j_ != nullptr && !j_->is_object()) {
            throw ConfigError(path_, "expected an object");
        }
    }

    void allow(std::initializer_list<std::string_view> keys) const {
        if (j_ == nullptr) return;
        for (auto it = j_->begin(); it != j_->end(); ++it) {
            if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
                std::string list;
                for (auto k : keys) list += (list.empty() ? "" : ", ") + std::string(k);
                throw ConfigError(at(it.key()), "unknown key (allowed: " + list + ")");
            }
        }
    }

    bool has(const std::string &k) const { return j_ != nullptr && j_->contains(k) && !(*j_)[k].is_null(); }

    const Json &raw(const std::string &k) const {
        if (!has(k)) throw ConfigError(at(k), "required key missing");
        return (*j_)[k];
    }

    double num(const std::string &k, std::optional<double> def = std::nullopt) const {
        if (!has(k)) {
            if (def) return *def;
            throw ConfigError(at(k), "required number missing");
        }
        const Json &v = (*j_)[k];
        if (!v.is_number()) throw ConfigError(at(k), "expected a number");
        return v.get<double>();
    }

    std::optional<double> opt_num(const std::string &k) const {
        if (!has(k)) return std::nullopt;
        return num(k);
    }

    std::int64_t integer(const std::string &k, std::optional<std::int64_t> def = std::nullopt,
                         std::int64_t lo = 0) const {
        if (!has(k)) {
            if (def) return *def;
            throw ConfigError(at(k), "required integer missing");
        }
        const Json &v = (*j_)[k];
        if (!v.is_number_integer()) throw ConfigError(at(k), "expected an integer");
        const auto x = v.get<std::int64_t>();
        if (x < lo) throw ConfigError(at(k), "must be at least " + std::to_string(lo));
        return x;
    }

    std::size_t size(const std::string &k, std::optional<std::size_t> def = std::nullopt, std::size_t lo = 0) const {
        std::optional<std::int64_t> d;
        if (def) d = static_cast<std::int64_t>(*def);
        return static_cast<std::size_t>(integer(k, d, static_cast<std::int64_t>(lo)));
    }

    bool flag(const std::string &k, bool def) const {
        if (!has(k)) return def;
        const Json &v = (*j_)[k];
        if (!v.is_boolean()) throw ConfigError(at(k), "expected true or false");
        return v.get<bool>();
    }

    std::string str(const std::string &k, std::optional<std::string> def,
                    std::initializer_list<std::string_view> choices = {}) const {
        std::string s;
        if (!has(k)) {
            if (!def) throw ConfigError(at(k), "required string missing");
            s = *def;
        } else {
            const Json &v = (*j_)[k];
            if (!v.is_string()) throw ConfigError(at(k), "expected a string");
            s = v.get<std::string>();
        }
        if (choices.size() > 0 && std::find(choices.begin(), choices.end(), s) == choices.end()) {
            std::string list;
            for (auto c : choices) list += (list.empty() ? "" : ", ") + std::string(c);
            throw ConfigError(at(k), "unsupported value '" + s + "' (expected one of: " + list + ")");
        }
        return s;
    }

    Node child(const std::string &k) const {
        if (!has(k)) return Node(nullptr, at(k));
        return Node(&(*j_)[k], at(k));
    }

    std::string at(const std::string &k) const { return path_ + "." + k; }

   private:
    const Json *j_;
    std::string path_;
};

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct Result {
    Json summary = Json::object();
    std::vector<Table> tables;
    /// Extra JSON documents written as <name>.json regardless of format.
    std::vector<std::pair<std::string, Json>> documents;
};

struct Context {
    std::uint64_t seed;
};

// Failures inside a handler keep the config path they were raised under.
template <typename F>
auto guarded(const std::string &path, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(path, e.what());
    }
}

FrequencyGrid read_grid(const Node &n) {
    n.allow({"center", "span", "n_points"});
    const double center = n.num("center", 0.0);
    const double span = n.num("span");
    const std::size_t points = n.size("n_points");
    return guarded(n.at("n_points").substr(0, n.at("n_points").rfind('.')),
                   [&] { return make_grid(center, span, points); });
}

CVector read_vector(const Node &n, const std::string &k) {
    return guarded(n.at(k), [&] { return vector_from_json(n.raw(k)); });
}

CMatrix random_unitary(std::size_t d, Rng &rng) {
    std::normal_distribution<double> g;
    const auto n = static_cast<Eigen::Index>(d);
    CMatrix z(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) z(i, j) = cplx{g(rng), g(rng)};
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx ph = r(k, k) / std::abs(r(k, k));
        q.col(k) *= ph;
    }
    return q;
}

CMatrix random_density(std::size_t d, Rng &rng) {
    std::normal_distribution<double> g;
    const auto n = static_cast<Eigen::Index>(d);
    CMatrix z(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) z(i, j) = cplx{g(rng), g(rng)};
    CMatrix rho = z * z.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

Result cmd_modes(const Node &cfg, const Context &, bool) {
    cfg.allow({"grid", "count", "center", "width", "time_domain"});
    const FrequencyGrid grid = read_grid(cfg.child("grid"));
    const int count = static_cast<int>(cfg.integer("count", 4, 1));
    const double center = cfg.num("center", grid.center());
    const double width = cfg.num("width", 1.0);
    const ModeBasis basis = guarded("$", [&] { return hermite_gaussian_basis(count, center, width, grid); });
    Result r;
    const CMatrix gram = basis.gram();
    r.summary["count"] = count;
    r.summary["width"] = width;
    r.summary["grid"] = to_json(grid);
    r.summary["max_gram_deviation"] =
        (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    Table t{"modes", {"omega"}, {}};
    for (const auto &m : basis.modes()) {
        for (const char *s : {"_re", "_im", "_abs", "_arg"}) t.header.push_back(m.label() + s);
    }
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        std::vector<double> row{grid.point(i)};
        for (const auto &m : basis.modes()) {
            const cplx a = m.amplitude()[static_cast<Eigen::Index>(i)];
            row.insert(row.end(), {a.real(), a.imag(), std::abs(a), std::arg(a)});
        }
        t.rows.push_back(std::move(row));
    }
    r.tables.push_back(std::move(t));
    if (cfg.flag("time_domain", false)) {
        std::vector<TemporalMode> tm;
        for (const auto &m : basis.modes()) tm.push_back(to_time_domain(m));
        Table tt{"modes_time", {"t"}, {}};
        for (const auto &m : tm) {
            for (const char *s : {"_re", "_im", "_abs", "_arg"}) tt.header.push_back(m.label() + s);
        }
        const FrequencyGrid &tg = tm.front().grid();
        for (std::size_t i = 0; i < tg.n_points(); ++i) {
            std::vector<double> row{tg.point(i)};
            for (const auto &m : tm) {
                const cplx a = m.amplitude()[static_cast<Eigen::Index>(i)];
                row.insert(row.end(), {a.real(), a.imag(), std::abs(a), std::arg(a)});
            }
            tt.rows.push_back(std::move(row));
        }
        r.tables.push_back(std::move(tt));
    }
    return r;
}

Result cmd_decompose(const Node &cfg, const Context &, bool) {
    cfg.allow({"grid", "pump", "phasematch", "schmidt", "export_jsa", "export_modes"});
    const FrequencyGrid grid = read_grid(cfg.child("grid"));
    const Node pn = cfg.child("pump");
    pn.allow({"order", "sigma", "center"});
    PumpSpec pump{static_cast<int>(pn.integer("order", 0)), pn.num("sigma", 1.0), pn.num("center", 2.0 * grid.center())};
    const Node mn = cfg.child("phasematch");
    mn.allow({"model", "width", "angle"});
    PhasematchSpec pm;
    pm.model = mn.str("model", "gaussian", {"gaussian", "sinc"}) == "sinc" ? PhasematchModel::sinc
                                                                           : PhasematchModel::gaussian;
    pm.width = mn.num("width", pump.sigma);
    pm.angle = mn.opt_num("angle");
    const Node sn = cfg.child("schmidt");
    sn.allow({"truncation", "cumulative_target", "reference_width"});
    SchmidtOptions opt;
    if (sn.has("truncation")) opt.truncation = sn.size("truncation", std::nullopt, 1);
    opt.cumulative_target = sn.num("cumulative_target", opt.cumulative_target);
    opt.reference_width = sn.opt_num("reference_width");
    if (!opt.reference_width && pm.model == PhasematchModel::gaussian && !pm.angle && pm.width == pump.sigma) {
        opt.reference_width = matched_schmidt_width(pump.sigma);
    }
    const JointSpectralAmplitude f = guarded("$.pump", [&] {
        return jsa(pump_envelope(pump, grid, grid), phasematching(pm, grid, grid));
    });
    const SchmidtDecomposition sd = guarded("$.schmidt", [&] { return schmidt_decompose(f, opt); });
    std::vector<double> w(sd.weights.data(), sd.weights.data() + sd.weights.size());
    std::vector<double> lam;
    for (double x : w) lam.push_back(x * x);
    std::vector<double> full;
    for (Eigen::Index k = 0; k < sd.spectrum.size(); ++k) full.push_back(sd.spectrum[k]);
    Result r;
    r.summary = to_json(sd, false);
    r.summary["purity"] = purity(full);
    r.summary["schmidt_number"] = schmidt_number(full);
    Table wt{"weights", {"k", "weight", "lambda"}, {}};
    for (std::size_t k = 0; k < w.size(); ++k) wt.rows.push_back({static_cast<double>(k), w[k], lam[k]});
    r.tables.push_back(std::move(wt));
    const std::size_t nm = std::min(cfg.size("export_modes", std::min<std::size_t>(w.size(), 4)), w.size());
    if (nm > 0) {
        Table mt{"schmidt_modes", {"omega"}, {}};
        for (std::size_t k = 0; k < nm; ++k) {
            for (const char *side : {"signal", "idler"}) {
                for (const char *s : {"_re", "_im"}) mt.header.push_back(std::string(side) + std::to_string(k) + s);
            }
        }
        for (std::size_t i = 0; i < grid.n_points(); ++i) {
            std::vector<double> row{grid.point(i)};
            for (std::size_t k = 0; k < nm; ++k) {
                const cplx a = sd.signal_modes[k].amplitude()[static_cast<Eigen::Index>(i)];
                const cplx b = sd.idler_modes[k].amplitude()[static_cast<Eigen::Index>(i)];
                row.insert(row.end(), {a.real(), a.imag(), b.real(), b.imag()});
            }
            mt.rows.push_back(std::move(row));
        }
        r.tables.push_back(std::move(mt));
    }
    if (cfg.flag("export_jsa", false)) {
        Table jt{"jsa", {"omega_s", "omega_i", "re", "im"}, {}};
        for (std::size_t i = 0; i < grid.n_points(); ++i)
            for (std::size_t j = 0; j < grid.n_points(); ++j) {
                const cplx a = f.amplitude()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                jt.rows.push_back({grid.point(i), grid.point(j), a.real(), a.imag()});
            }
        r.tables.push_back(std::move(jt));
    }
    return r;
}

Result cmd_qpg(const Node &cfg, const Context &, bool) {
    cfg.allow({"dim", "target", "theta", "efficiency", "residual_thetas", "input"});
    const std::size_t dim = cfg.size("dim", std::nullopt, 1);
    CVector target;
    const Json &tj = cfg.raw("target");
    if (tj.is_number_integer()) {
        const auto m = tj.get<std::int64_t>();
        if (m < 0 || static_cast<std::size_t>(m) >= dim) throw ConfigError("$.target", "mode index out of range");
        target = CVector::Zero(static_cast<Eigen::Index>(dim));
        target[m] = 1.0;
    } else {
        target = read_vector(cfg, "target");
    }
    if (static_cast<std::size_t>(target.size()) != dim) throw ConfigError("$.target", "length differs from dim");
    if (cfg.has("theta") && cfg.has("efficiency")) throw ConfigError("$.theta", "give theta or efficiency, not both");
    QpgSpec spec = cfg.has("efficiency")
                       ? guarded("$.efficiency", [&] { return QpgSpec::from_efficiency(target, cfg.num("efficiency")); })
                       : QpgSpec{target, cfg.num("theta", kPi / 2.0), std::nullopt};
    if (cfg.has("residual_thetas")) {
        const Json &rj = cfg.raw("residual_thetas");
        if (!rj.is_array()) throw ConfigError("$.residual_thetas", "expected an array of angles");
        spec.residual_thetas = rj.get<std::vector<double>>();
    }
    const RegisterUnitary u = guarded("$", [&] { return qpg_operator(spec); });
    Result r;
    r.summary["dim"] = dim;
    r.summary["theta"] = spec.theta;
    r.summary["efficiency"] = spec.efficiency();
    r.summary["unitarity_residual"] = unitarity_residual(u.matrix());
    if (spec.residual_thetas) {
        std::vector<double> th = *spec.residual_thetas;
        th.at(*spec.basis_index()) = spec.theta;
        r.summary["selectivity"] = selectivity(th, *spec.basis_index());
    }
    r.documents.emplace_back("unitary", to_json(u.matrix()));
    if (cfg.has("input")) {
        const CVector in = read_vector(cfg, "input");
        const RegisterState out = guarded("$.input", [&] {
            return RegisterState(dim, CVector(in), false).with_green();
        });
        CVector full = CVector::Zero(u.matrix().rows());
        full.head(out.coeffs().size()) = out.coeffs();
        const CVector o = u.matrix() * full;
        r.summary["output"] = to_json(o);
        r.summary["converted_power"] = o.tail(o.size() - static_cast<Eigen::Index>(dim)).squaredNorm();
    }
    return r;
}

Result cmd_gates(const Node &cfg, const Context &ctx, bool) {
    cfg.allow({"mode", "gate", "phi", "unitary", "dim", "count"});
    const std::string mode = cfg.str("mode", "verify_all", {"verify_all", "compile_gate", "compile_unitary"});
    const double phi = cfg.num("phi", kPi / 3.0);
    Result r;
    Table t{"gates", {"index", "length", "distance", "leakage"}, {}};
    if (mode == "verify_all") {
        Json names = Json::array();
        double worst = 0.0;
        for (const GateCheck &c : verify_all_gates(phi)) {
            names.push_back(c.name);
            t.rows.push_back({static_cast<double>(t.rows.size()), static_cast<double>(c.length), c.distance, c.leakage});
            worst = std::max(worst, c.distance);
        }
        r.summary["gates"] = names;
        r.summary["max_distance"] = worst;
        Json progs = Json::object();
        for (const auto &n : names) {
            progs[n.get<std::string>()] = to_json(compile_gate(parse_gate_name(n.get<std::string>()), phi));
        }
        r.documents.emplace_back("programs", std::move(progs));
    } else if (mode == "compile_gate") {
        const std::string name = cfg.str("gate", std::nullopt);
        const GateName g = guarded("$.gate", [&] { return parse_gate_name(name); });
        const GateSequence seq = compile_gate(g, phi);
        const RegisterUnitary u = evaluate(seq);
        const double dist = phase_distance(u.register_block(), gate_target(g, phi));
        t.rows.push_back({0.0, static_cast<double>(seq.primitives.size()), dist, green_leakage(u)});
        r.summary["gate"] = name;
        r.summary["distance"] = dist;
        r.documents.emplace_back("programs", to_json(seq));
    } else {
        std::vector<CMatrix> targets;
        if (cfg.has("unitary")) {
            targets.push_back(guarded("$.unitary", [&] { return matrix_from_json(cfg.raw("unitary")); }));
        } else {
            const std::size_t d = cfg.size("dim", 4, 1);
            const std::size_t count = cfg.size("count", 1, 1);
            for (std::size_t k = 0; k < count; ++k) {
                Rng rng = make_stream(ctx.seed, "gates", k);
                targets.push_back(random_unitary(d, rng));
            }
        }
        Json progs = Json::array();
        double worst = 0.0;
        for (const CMatrix &u : targets) {
            const GateSequence seq = guarded("$.unitary", [&] { return compile_qudit_unitary(u); });
            const RegisterUnitary e = evaluate(seq);
            const double dist = (e.register_block() - u).cwiseAbs().maxCoeff();
            worst = std::max(worst, dist);
            t.rows.push_back({static_cast<double>(t.rows.size()), static_cast<double>(seq.primitives.size()), dist,
                              green_leakage(e)});
            progs.push_back(to_json(seq));
        }
        r.summary["max_roundtrip_error"] = worst;
        r.documents.emplace_back("programs", std::move(progs));
    }
    r.tables.push_back(std::move(t));
    return r;
}

Result cmd_tomo(const Node &cfg, const Context &ctx, bool) {
    cfg.allow({"kind", "dim", "dim_a", "dim_b", "state", "shots", "sanitize"});
    const std::string kind = cfg.str("kind", "single", {"single", "biphoton"});
    std::optional<std::uint64_t> shots;
    if (cfg.has("shots")) shots = static_cast<std::uint64_t>(cfg.integer("shots", std::nullopt, 1));
    Result r;
    if (kind == "single") {
        const std::size_t dim = cfg.size("dim", 2, 1);
        CMatrix rho;
        const Json &sj = cfg.has("state") ? cfg.raw("state") : Json("random");
        if (sj.is_string()) {
            const std::string s = cfg.str("state", "random", {"random", "maximally_mixed"});
            if (s == "random") {
                Rng rng = make_stream(ctx.seed, "tomo-state");
                rho = random_density(dim, rng);
            } else {
                rho = DensityMatrix::maximally_mixed(dim).matrix();
            }
        } else {
            rho = guarded("$.state", [&] { return matrix_from_json(sj); });
        }
        const DensityMatrix truth = guarded("$.state", [&] { return DensityMatrix(rho); });
        if (truth.dim() != dim) throw ConfigError("$.state", "state dimension differs from dim");
        const auto plan = single_full_plan(dim);
        std::vector<RateRecord> recs;
        Table t{"records", {"zeta", "phi", "first", "second", "converted", "transmitted"}, {}};
        for (std::size_t k = 0; k < plan.size(); ++k) {
            Rng rng = make_stream(ctx.seed, "tomo", k);
            recs.push_back(simulate_single(truth, plan[k], shots, &rng));
            const auto &x = recs.back();
            t.rows.push_back({x.setting.zeta, x.setting.phi, static_cast<double>(x.setting.first),
                              static_cast<double>(x.setting.second), x.converted, x.transmitted});
        }
        const PartialDensityMatrix rec = reconstruct_single(recs, dim);
        double err = 0.0;
        for (Eigen::Index i = 0; i < rec.values.rows(); ++i)
            for (Eigen::Index j = 0; j < rec.values.cols(); ++j)
                if (rec.known(i, j)) err = std::max(err, std::abs(rec.values(i, j) - rho(i, j)));
        r.summary["kind"] = kind;
        r.summary["dim"] = dim;
        r.summary["settings"] = plan.size();
        r.summary["max_element_error"] = err;
        r.summary["fit_residual"] = rec.residual;
        r.documents.emplace_back("reconstruction", to_json(rec));
        r.documents.emplace_back("truth", to_json(rho));
        if (cfg.flag("sanitize", false)) {
            const SanitizeResult s = sanitize(rec.values, ZeroPolicy::maximally_mixed);
            r.summary["sanitize_distance"] = s.distance;
            r.documents.emplace_back("sanitized", to_json(s.rho.matrix()));
        }
        r.tables.push_back(std::move(t));
        return r;
    }
    const std::size_t da = cfg.size("dim_a", 2, 2);
    const std::size_t db = cfg.size("dim_b", 2, 2);
    CMatrix rho;
    const Json &sj = cfg.has("state") ? cfg.raw("state") : Json("random");
    if (sj.is_string()) {
        const std::string s = cfg.str("state", "random", {"random", "bell"});
        if (s == "random") {
            Rng rng = make_stream(ctx.seed, "tomo-state");
            rho = random_density(da * db, rng);
        } else {
            if (da != 2 || db != 2) throw ConfigError("$.state", "bell state needs dim_a = dim_b = 2");
            CVector psi = CVector::Zero(4);
            psi[1] = psi[2] = 1.0 / std::sqrt(2.0);
            rho = psi * psi.adjoint();
        }
    } else {
        rho = guarded("$.state", [&] { return matrix_from_json(sj); });
    }
    const BipartiteState state =
        guarded("$.state", [&] { return BipartiteState::mixed(DensityTensor::from_matrix(da, db, rho)); });
    std::vector<CoincidenceRecord> recs;
    Table t{"records",
            {"zeta_a", "phi_a", "m", "n", "zeta_b", "phi_b", "p", "q", "cc", "ct", "tc", "tt"},
            {}};
    std::size_t idx = 0;
    for (std::size_t m = 0; m < da; ++m)
        for (std::size_t n = m + 1; n < da; ++n)
            for (std::size_t p = 0; p < db; ++p)
                for (std::size_t q = p + 1; q < db; ++q)
                    for (const auto &[a, b] : biphoton_setting_cycle(m, n, p, q)) {
                        Rng rng = make_stream(ctx.seed, "tomo", idx++);
                        recs.push_back(simulate_biphoton(state, a, b, shots, &rng));
                        const auto &x = recs.back();
                        t.rows.push_back({a.zeta, a.phi, double(a.first), double(a.second), b.zeta, b.phi,
                                          double(b.first), double(b.second), x.rates[0], x.rates[1], x.rates[2],
                                          x.rates[3]});
                    }
    const PartialDensityTensor rec = reconstruct_biphoton(recs, da, db);
    const DensityTensor truth = state.tensor();
    double err = 0.0;
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < db; ++j)
            for (std::size_t k = 0; k < da; ++k)
                for (std::size_t l = 0; l < db; ++l)
                    if (rec.is_known(i, j, k, l)) err = std::max(err, std::abs(rec.values(i, j, k, l) - truth(i, j, k, l)));
    r.summary["kind"] = kind;
    r.summary["dim_a"] = da;
    r.summary["dim_b"] = db;
    r.summary["settings"] = recs.size();
    r.summary["max_element_error"] = err;
    r.summary["fit_residual"] = rec.residual;
    r.documents.emplace_back("reconstruction", to_json(rec.values.to_matrix()));
    r.documents.emplace_back("truth", to_json(rho));
    r.tables.push_back(std::move(t));
    return r;
}

Result cmd_qkd(const Node &cfg, const Context &ctx, bool) {
    cfg.allow({"d", "n_bases", "n_rounds", "eve", "log"});
    const std::size_t d = cfg.size("d", 2, 2);
    const std::size_t nb = cfg.size("n_bases", 2, 1);
    const std::uint64_t rounds = static_cast<std::uint64_t>(cfg.integer("n_rounds", 10000, 1));
    const Eavesdropper eve = parse_eavesdropper(cfg.str("eve", "none", {"none", "intercept_resend"}));
    const bool log = cfg.flag("log", false);
    const QkdRecord rec = guarded("$", [&] { return bb84_run(d, rounds, nb, eve, ctx.seed, log); });
    Result r;
    r.summary = to_json(rec);
    if (eve == Eavesdropper::intercept_resend) {
        const double th = qber_theory(d, nb, eve);
        r.summary["qber_theory"] = th;
        const double n = static_cast<double>(rec.sifted_length);
        r.summary["qber_sigma"] = n > 0 ? std::sqrt(th * (1.0 - th) / n) : 0.0;
    }
    if (log) {
        Table t{"rounds", {"alice_basis", "alice_symbol", "eve_basis", "eve_outcome", "bob_basis", "bob_outcome"}, {}};
        for (const RoundLog &l : rec.log) {
            t.rows.push_back({double(l.alice_basis), double(l.alice_symbol), l.eve_basis ? double(*l.eve_basis) : -1.0,
                              l.eve_outcome ? double(*l.eve_outcome) : -1.0, double(l.bob_basis),
                              double(l.bob_outcome)});
        }
        r.tables.push_back(std::move(t));
    }
    return r;
}

Result cmd_fuse(const Node &cfg, const Context &ctx, bool) {
    cfg.allow({"qubits", "coeffs", "n", "slot_a", "slot_b", "sample"});
    std::optional<MultiQubitState> s;
    if (cfg.has("qubits")) {
        const Json &q = cfg.raw("qubits");
        if (!q.is_array()) throw ConfigError("$.qubits", "expected an array of qubit vectors");
        std::vector<CVector> qs;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const std::string p = "$.qubits[" + std::to_string(i) + "]";
            qs.push_back(guarded(p, [&] {
                CVector v = vector_from_json(q[i]);
                return CVector(v / v.norm());
            }));
        }
        s = guarded("$.qubits", [&] { return MultiQubitState::product(qs); });
    } else {
        const std::size_t n = cfg.size("n", std::nullopt, 2);
        const CVector c = read_vector(cfg, "coeffs");
        s = guarded("$.coeffs", [&] { return MultiQubitState(n, c); });
    }
    const std::size_t a = cfg.size("slot_a", 0);
    const std::size_t b = cfg.size("slot_b", 1);
    Result r;
    const auto dist = guarded("$.slot_a", [&] { return apply_fusion(*s, a, b); });
    Json outs = Json::array();
    for (const auto &o : dist) outs.push_back(to_json(o));
    r.summary["outcomes"] = std::move(outs);
    if (cfg.flag("sample", false)) {
        Rng rng = make_stream(ctx.seed, "fuse");
        r.summary["sampled"] = to_json(apply_fusion(*s, a, b, rng));
    }
    return r;
}

Result cmd_cluster(const Node &cfg, const Context &ctx, bool) {
    cfg.allow({"target_n", "trials", "policy", "bell_supply"});
    const std::size_t target = cfg.size("target_n", 3, 2);
    const std::size_t trials = cfg.size("trials", 100, 1);
    const FailurePolicy policy = parse_failure_policy(cfg.str("policy", "truncate", {"truncate", "keep_chain"}));
    std::optional<std::uint64_t> supply;
    if (cfg.has("bell_supply")) supply = static_cast<std::uint64_t>(cfg.integer("bell_supply", std::nullopt, 1));
    Table t{"trials", {"trial", "pairs_consumed", "attempts", "successes", "failures", "min_stabilizer"}, {}};
    double pairs = 0.0;
    double attempts = 0.0;
    bool all_pass = true;
    for (std::size_t k = 0; k < trials; ++k) {
        Rng rng = make_stream(ctx.seed, "cluster", k);
        const ClusterGrowth g = guarded("$.bell_supply", [&] { return grow_linear_cluster(target, supply, rng, policy); });
        const ClusterReport rep = verify_cluster(g.state, target);
        all_pass = all_pass && rep.pass;
        const double mn = *std::min_element(rep.stabilizers.begin(), rep.stabilizers.end());
        t.rows.push_back({double(k), double(g.report.pairs_consumed), double(g.report.attempts),
                          double(g.report.successes), double(g.report.failures), mn});
        pairs += double(g.report.pairs_consumed);
        attempts += double(g.report.attempts);
    }
    Result r;
    r.summary["target_n"] = target;
    r.summary["trials"] = trials;
    r.summary["policy"] = failure_policy_name(policy);
    r.summary["mean_pairs_consumed"] = pairs / double(trials);
    r.summary["mean_attempts"] = attempts / double(trials);
    if (target > 2) {
        r.summary["pairs_per_added_qubit"] = (pairs / double(trials) - 1.0) / double(target - 2);
    }
    r.summary["all_stabilizers_pass"] = all_pass;
    r.tables.push_back(std::move(t));
    return r;
}

using Handler = std::function<Result(const Node &, const Context &, bool)>;

const std::map<std::string, std::pair<Handler, std::string>> &handlers() {
    static const std::map<std::string, std::pair<Handler, std::string>> h{
        {"modes", {cmd_modes, "Hermite-Gaussian mode amplitudes and phases"}},
        {"decompose", {cmd_decompose, "JSA construction and Schmidt decomposition"}},
        {"qpg", {cmd_qpg, "QPG unitary, efficiency and selectivity"}},
        {"gates", {cmd_gates, "gate recipes and qudit unitary compilation"}},
        {"tomo", {cmd_tomo, "QPG tomography simulation and reconstruction"}},
        {"qkd", {cmd_qkd, "TM-encoded prepare-and-measure key distribution"}},
        {"fuse", {cmd_fuse, "Type-I fusion outcome distribution"}},
        {"cluster", {cmd_cluster, "linear cluster growth statistics"}},
    };
    return h;
}

void write_atomic(const fs::path &path, const std::string &content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path);
}

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

Json table_json(const Table &t) {
    return Json{{"columns", t.header}, {"rows", t.rows}};
}

void emit_error(std::ostream &err, const std::string &kind, const std::string &message,
                const std::optional<std::string> &path = std::nullopt) {
    Json e{{"kind", kind}, {"message", message}};
    if (path) e["path"] = *path;
    err << Json{{"error", e}}.dump() << "\n";
}

}  // namespace

std::string sha256_hex(const std::string &data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return os.str();
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"tmq: temporal-mode quantum information toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir = "tmq_out";
    std::string format = "json";
    for (const auto &[name, h] : handlers()) {
        CLI::App *sub = app.add_subcommand(name, h.second);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--format", format, "table format")->check(CLI::IsMember({"json", "csv"}));
    }
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion &) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError &e) {
        emit_error(err, "usage", e.what());
        return 2;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Json config = Json::object();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("$", "cannot read config file " + config_path);
            try {
                config = Json::parse(f);
            } catch (const Json::parse_error &e) {
                throw ConfigError("$", std::string("invalid JSON: ") + e.what());
            }
            if (!config.is_object()) throw ConfigError("$", "config root must be an object");
        }
        const Context ctx{seed};
        Result res = handlers().at(cmd).first(Node(&config, "$"), ctx, format == "csv");
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        std::vector<std::string> written;
        auto put = [&](const std::string &name, const std::string &content) {
            write_atomic(dir / name, content);
            written.push_back(name);
        };
        put("summary.json", dump(res.summary));
        for (const auto &t : res.tables) {
            if (format == "csv") {
                put(t.name + ".csv", to_csv(t.header, t.rows));
            } else {
                put(t.name + ".json", dump(table_json(t)));
            }
        }
        for (const auto &[name, doc] : res.documents) {
            put(name + ".json", dump(doc));
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        Json manifest{{"subcommand", cmd},
                      {"config_sha256", sha256_hex(cmd + "\n" + config.dump())},
                      {"seed", seed},
                      {"format", format},
                      {"version", kVersion},
                      {"wall_time_s", wall},
                      {"outputs", written}};
        write_atomic(dir / "manifest.json", dump(manifest));
        out << res.summary.dump() << "\n";
        return 0;
    } catch (const ConfigError &e) {
        emit_error(err, "config", e.what(), e.path);
        return 2;
    } catch (const std::exception &e) {
        emit_error(err, "runtime", e.what());
        return 1;
    }
}

}  // namespace tmq::cli
