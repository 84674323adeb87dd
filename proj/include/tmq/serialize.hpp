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

#ifndef TMQ_SERIALIZE_HPP
#define TMQ_SERIALIZE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "tmq/common.hpp"
#include "tmq/fusion_cluster.hpp"
#include "tmq/gate_compiler.hpp"
#include "tmq/mub_qkd.hpp"
#include "tmq/pdc_model.hpp"
#include "tmq/tm_basis.hpp"
#include "tmq/tomography.hpp"

namespace tmq {

using Json = nlohmann::ordered_json;

/// Complex matrices are {"rows", "cols", "re": [[..]], "im": [[..]]}.
Json to_json(const CMatrix &m);
CMatrix matrix_from_json(const Json &j);
/// Complex vectors are {"re": [..], "im": [..]}.
Json to_json(const CVector &v);
CVector vector_from_json(const Json &j);
Json to_json(const RVector &v);

Json to_json(const FrequencyGrid &g);
Json to_json(const TemporalMode &m);
Json to_json(const SchmidtDecomposition &s, bool with_modes);
Json to_json(const Primitive &p);
Json to_json(const GateSequence &seq);
Json to_json(const AnalyzerSetting &s);
Json to_json(const RateRecord &r);
Json to_json(const CoincidenceRecord &r);
Json to_json(const PartialDensityMatrix &p);
Json to_json(const QkdRecord &r);
Json to_json(const FusionOutcome &o);
Json to_json(const MultiQubitState &s);
Json to_json(const ResourceReport &r);

/// Comma-separated table with a header row; numbers at 17 significant digits.
std::string to_csv(const std::vector<std::string> &header, const std::vector<std::vector<double>> &rows);

/// Grid columns of a mode: axis value, Re, Im, |a|, arg a.
std::string mode_table_csv(const std::vector<TemporalMode> &modes);

}  // namespace tmq

#endif  // TMQ_SERIALIZE_HPP
