// SPDX-License-Identifier: Apache-2.0
//
// dirichlet-omp: off-grid beamspace channel estimation for hybrid mmWave MIMO
// Copyright (C) 2026 The dirichlet-omp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "domp/analysis.hpp"

namespace domp::cli
{
    enum class Command
    {
        simulate,
        sweep_snr,
        sweep_measurements,
        lemma1,
        kernel_dump,
    };

    std::string_view to_string(Command command) noexcept;

    // Bad flags, bad config-file keys or inconsistent values (exit code 2)
    class UsageError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline constexpr int exit_ok = 0;
    inline constexpr int exit_usage = 2;
    inline constexpr int exit_runtime = 3;

    struct RunConfig
    {
        Command command = Command::sweep_snr;
        ScenarioSpec scenario{};
        std::vector<EstimatorKind> estimators{std::begin(all_estimators), std::end(all_estimators)};
        std::vector<double> snr_db;      // sweep-snr axis; simulate uses the first entry
        std::vector<int> measurements;   // sweep-measurements axis; others use the first entry
        std::optional<double> epsilon;   // fixed residual tolerance instead of the noise-floor rule
        CellOffsets offset{0.5, 0.5};    // kernel-dump peak offset
        int threads = 1;
        std::string output_path;
    };

    // Parses argv (argv[0] is the program name). Flags override values read
    // from --config; unknown keys and invalid values raise UsageError. Returns
    // nullopt when help was requested and printed to `out`.
    std::optional<RunConfig> parse_config(int argc, const char *const *argv, std::ostream &out);

    // "# key=value" lines with the fully resolved configuration
    std::string header_comment(const RunConfig &config);

    // CSV writers (17 significant digits, byte-deterministic)
    void write_trials_csv(std::ostream &os, const RunConfig &config, const SweepResult &result);
    void write_summary_csv(std::ostream &os, const RunConfig &config, const SweepResult &result);
    void write_lemma1_csv(std::ostream &os, const RunConfig &config);
    void write_kernel_csv(std::ostream &os, const RunConfig &config);

    // `<stem>_summary<ext>` next to the trial file
    std::string summary_path(const std::string &trials_path);

    // Executes the command; progress goes to `out`, diagnostics to `err`.
    // Returns the process exit code.
    int run(const RunConfig &config, std::ostream &out, std::ostream &err);

    // parse_config + run with the exit-code mapping of the command-line tool
    int main(int argc, const char *const *argv, std::ostream &out, std::ostream &err);
}
