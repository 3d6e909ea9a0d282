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

// qmetro <command> --config PATH [--seed U64] [--out PATH] [--format csv|json|both]

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qmetro/cli.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "json";
};

void add_flags(CLI::App *sub, Flags &flags) {
    sub->add_option("--config", flags.config, "JSON configuration file")->required();
    sub->add_option("--seed", flags.seed, "root seed (overrides the config)");
    sub->add_option("--out", flags.out, "output path (default: stdout)");
    sub->add_option("--format", flags.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
}

}  // namespace

int main(int argc, char **argv) {
    namespace qc = qmetro::cli;
    CLI::App app{"Quantum metrology simulator for non-identical unitary channels"};
    app.require_subcommand(1);
    Flags flags;
    const std::pair<const char *, const char *> commands[] = {
        {"qfi", "quantum and classical information matrices of a scheme"},
        {"simulate", "Monte-Carlo MSE experiment"},
        {"sweep", "MSE experiments over shots or channel count"},
        {"verify-lemma", "numerical checks of the trace bound and its maximizers"},
        {"adaptive", "staged adaptive estimation traces"},
    };
    for (const auto &[name, help] : commands) {
        add_flags(app.add_subcommand(name, help), flags);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : qc::kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    qc::json config;
    try {
        std::ifstream in(flags.config);
        if (!in) {
            std::cerr << "error: cannot read " << flags.config << "\n";
            return qc::kExitConfig;
        }
        config = qc::json::parse(in);
    } catch (const qc::json::exception &e) {
        std::cerr << "error: " << flags.config << ": " << e.what() << "\n";
        return qc::kExitConfig;
    }

    qc::CommandOptions options;
    options.seed = flags.seed;
    options.out = flags.out;
    options.format = qc::parse_format(flags.format);

    const qc::CommandResult result = qc::run_command(command, config, options);
    if (!result.message.empty()) {
        std::cerr << (result.exit_code == 0 ? "warning: " : "error: ") << result.message << "\n";
    }
    try {
        qc::write_artifacts(result, options, std::cout);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return qc::kExitConfig;
    }
    return result.exit_code;
}
