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

#include "tmq/serialize.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace tmq {

namespace {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

Json to_json(const CMatrix &m) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json rr = Json::array();
        Json ri = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ri.push_back(m(r, c).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix matrix_from_json(const Json &j) {
    if (!j.is_object() || !j.contains("re")) {
        throw std::invalid_argument("matrix must be an object with 're' (and optional 'im') rows");
    }
    const Json &re = j.at("re");
    const auto rows = static_cast<Eigen::Index>(re.size());
    if (rows == 0) {
        throw std::invalid_argument("matrix has no rows");
    }
    const auto cols = static_cast<Eigen::Index>(re.at(0).size());
    CMatrix m = CMatrix::Zero(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(re.at(r).size()) != cols) {
            throw std::invalid_argument("matrix rows have unequal length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = re.at(r).at(c).get<double>();
        }
    }
    if (j.contains("im")) {
        const Json &im = j.at("im");
        if (static_cast<Eigen::Index>(im.size()) != rows) {
            throw std::invalid_argument("matrix 'im' shape differs from 're'");
        }
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (static_cast<Eigen::Index>(im.at(r).size()) != cols) {
                throw std::invalid_argument("matrix 'im' shape differs from 're'");
            }
            for (Eigen::Index c = 0; c < cols; ++c) {
                m(r, c) += kI * im.at(r).at(c).get<double>();
            }
        }
    }
    return m;
}

Json to_json(const CVector &v) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        re.push_back(v[i].real());
        im.push_back(v[i].imag());
    }
    return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

CVector vector_from_json(const Json &j) {
    if (j.is_array()) {
        CVector v(static_cast<Eigen::Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i) {
            v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
        }
        return v;
    }
    if (!j.is_object() || !j.contains("re")) {
        throw std::invalid_argument("vector must be a number array or an object with 're' (and optional 'im')");
    }
    const Json &re = j.at("re");
    CVector v(static_cast<Eigen::Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = re[i].get<double>();
    }
    if (j.contains("im")) {
        const Json &im = j.at("im");
        if (im.size() != re.size()) {
            throw std::invalid_argument("vector 'im' length differs from 're'");
        }
        for (std::size_t i = 0; i < im.size(); ++i) {
            v[static_cast<Eigen::Index>(i)] += kI * im[i].get<double>();
        }
    }
    return v;
}

Json to_json(const RVector &v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

Json to_json(const FrequencyGrid &g) {
    return Json{{"center", g.center()},
                {"span", g.span()},
                {"n_points", g.n_points()},
                {"axis", g.axis() == Axis::frequency ? "frequency" : "time"}};
}

Json to_json(const TemporalMode &m) {
    return Json{{"label", m.label()}, {"grid", to_json(m.grid())}, {"amplitude", to_json(m.amplitude())}};
}

Json to_json(const SchmidtDecomposition &s, bool with_modes) {
    Json j{{"truncation", s.truncation}, {"weights", to_json(s.weights)}};
    Json lam = Json::array();
    for (Eigen::Index k = 0; k < s.weights.size(); ++k) {
        lam.push_back(s.weights[k] * s.weights[k]);
    }
    j["lambdas"] = std::move(lam);
    if (with_modes) {
        Json sm = Json::array();
        Json im = Json::array();
        for (const auto &m : s.signal_modes) sm.push_back(to_json(m));
        for (const auto &m : s.idler_modes) im.push_back(to_json(m));
        j["signal_modes"] = std::move(sm);
        j["idler_modes"] = std::move(im);
    }
    return j;
}

Json to_json(const Primitive &p) {
    switch (p.kind) {
        case PrimitiveKind::q100: return Json{{"op", "Q100"}, {"target", to_json(p.target)}};
        case PrimitiveKind::q50: return Json{{"op", "Q50"}, {"target", to_json(p.target)}};
        case PrimitiveKind::green_phase: return Json{{"op", "green_phase"}, {"phase", p.phase}};
    }
    return Json();
}

Json to_json(const GateSequence &seq) {
    Json prims = Json::array();
    for (const auto &p : seq.primitives) prims.push_back(to_json(p));
    return Json{{"dim", seq.dim}, {"length", seq.primitives.size()}, {"primitives", std::move(prims)}};
}

Json to_json(const AnalyzerSetting &s) {
    return Json{{"zeta", s.zeta}, {"phi", s.phi}, {"first", s.first}, {"second", s.second}};
}

Json to_json(const RateRecord &r) {
    Json j{{"setting", to_json(r.setting)}, {"converted", r.converted}, {"transmitted", r.transmitted}};
    if (r.shots) j["shots"] = *r.shots;
    return j;
}

Json to_json(const CoincidenceRecord &r) {
    Json j{{"a", to_json(r.a)},
           {"b", to_json(r.b)},
           {"rates", {r.rates[0], r.rates[1], r.rates[2], r.rates[3]}}};
    if (r.shots) j["shots"] = *r.shots;
    return j;
}

Json to_json(const PartialDensityMatrix &p) {
    Json known = Json::array();
    for (Eigen::Index r = 0; r < p.known.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < p.known.cols(); ++c) row.push_back(static_cast<bool>(p.known(r, c)));
        known.push_back(std::move(row));
    }
    return Json{{"values", to_json(p.values)}, {"known", std::move(known)}, {"residual", p.residual}};
}

Json to_json(const QkdRecord &r) {
    return Json{{"d", r.dim},
                {"n_bases", r.n_bases},
                {"eve", eavesdropper_name(r.eve)},
                {"seed", r.seed},
                {"n_rounds", r.n_rounds},
                {"sifted_length", r.sifted_length},
                {"errors", r.errors},
                {"qber", r.qber}};
}

Json to_json(const MultiQubitState &s) { return Json{{"n", s.n()}, {"coeffs", to_json(s.coeffs())}}; }

Json to_json(const FusionOutcome &o) {
    Json j{{"detector", detector_name(o.detector)}, {"probability", o.probability}};
    j["post_state"] = o.post_state ? to_json(*o.post_state) : Json();
    return j;
}

Json to_json(const ResourceReport &r) {
    return Json{{"pairs_consumed", r.pairs_consumed},
                {"attempts", r.attempts},
                {"successes", r.successes},
                {"failures", r.failures}};
}

std::string to_csv(const std::vector<std::string> &header, const std::vector<std::vector<double>> &rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) {
        os << (i ? "," : "") << header[i];
    }
    os << '\n';
    for (const auto &row : rows) {
        if (row.size() != header.size()) {
            throw std::invalid_argument("to_csv: row width differs from header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << format_number(row[i]);
        }
        os << '\n';
    }
    return os.str();
}

std::string mode_table_csv(const std::vector<TemporalMode> &modes) {
    if (modes.empty()) {
        return "";
    }
    const FrequencyGrid &g = modes.front().grid();
    std::vector<std::string> header{g.axis() == Axis::frequency ? "omega" : "t"};
    for (const auto &m : modes) {
        if (!(m.grid() == g)) {
            throw std::invalid_argument("mode_table_csv: modes live on different grids");
        }
        for (const char *suffix : {"_re", "_im", "_abs", "_arg"}) {
            header.push_back(m.label() + suffix);
        }
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < g.n_points(); ++i) {
        std::vector<double> row{g.point(i)};
        for (const auto &m : modes) {
            const cplx a = m.amplitude()[static_cast<Eigen::Index>(i)];
            row.insert(row.end(), {a.real(), a.imag(), std::abs(a), std::arg(a)});
        }
        rows.push_back(std::move(row));
    }
    return to_csv(header, rows);
}

}  // namespace tmq
