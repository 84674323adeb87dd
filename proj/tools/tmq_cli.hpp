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

#ifndef TMQ_TOOLS_TMQ_CLI_HPP
#define TMQ_TOOLS_TMQ_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace tmq::cli {

inline constexpr const char *kVersion = "0.1.0";

/// Entry point of the `tmq` tool; `args` excludes the program name.
/// Returns the process exit code. Errors are written to `err` as one JSON object.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(const std::string &data);

}  // namespace tmq::cli

#endif  // TMQ_TOOLS_TMQ_CLI_HPP
