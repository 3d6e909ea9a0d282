// Copyright 2026 The qmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file cli.hpp
 * Config-driven command runner behind the `qmetro` executable and the Python
 * module. Configs are JSON objects with a required "version": 1; unknown keys
 * are rejected.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qmetro/channels.hpp"
#include "qmetro/core.hpp"

namespace qmetro::cli {

using json = nlohmann::json;

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNumerical = 3,
};

/// Invalid configuration (maps to exit code 2).
class ConfigError : public DomainError {
  public:
    using DomainError::DomainError;
};

enum class OutputFormat { Csv, Json, Both };

OutputFormat parse_format(std::string_view name);

struct CommandOptions {
    std::optional<std::uint64_t> seed;  // overrides the config file
    std::string out;                    // empty: write to the stdout stream
    OutputFormat format = OutputFormat::Json;
};

/// One rendered output file.
struct Artifact {
    std::string suffix;  // ".csv" or ".json"
    std::string content;
};

struct CommandResult {
    int exit_code = kExitOk;
    std::vector<Artifact> artifacts;
    std::string message;  // diagnostics for stderr
};

/// Runs one of: qfi, simulate, sweep, verify-lemma, adaptive. Never throws;
/// errors are reported through exit_code and message.
CommandResult run_command(std::string_view command, const json &config, const CommandOptions &options);

/// Writes the artifacts to options.out (replacing its extension when both
/// formats are requested) or to @p stdout_stream.
void write_artifacts(const CommandResult &result, const CommandOptions &options, std::ostream &stdout_stream);

/// Family from {"domain_upper": t, "channels": [{"form": ..., ...}], "repeat": k}.
DependentFamily parse_family(const json &spec, int repeat_override = 0);

/// %.17g formatting used in CSV output.
std::string format_double(double x);

}  // namespace qmetro::cli
