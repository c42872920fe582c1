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

#include "domp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

namespace domp::cli
{
    namespace
    {
        std::string num(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        template <class T>
        std::string join(const std::vector<T> &values, auto &&format)
        {
            std::string out;
            for (std::size_t i = 0; i < values.size(); ++i)
            {
                if (i)
                    out += ',';
                out += format(values[i]);
            }
            return out;
        }

        std::string db(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", 10.0 * std::log10(v));
            return buf;
        }

        const char *gain_name(GainModel g) { return g == GainModel::unit ? "unit" : "complex-gaussian"; }
        const char *placement_name(Placement p) { return p == Placement::on_grid ? "on-grid" : "off-grid"; }

        void require(bool ok, const std::string &message)
        {
            if (!ok)
                throw UsageError(message);
        }

        void apply_command_defaults(RunConfig &c)
        {
            if (c.snr_db.empty())
            {
                if (c.command == Command::sweep_snr)
                    c.snr_db = {0.0, 10.0, 20.0, 30.0};
                else
                    c.snr_db = {20.0};
            }
            if (c.measurements.empty())
            {
                if (c.command == Command::sweep_measurements)
                    c.measurements = {36, 64, 100, 144, 196};
                else
                    c.measurements = {100};
            }
            if (c.output_path.empty())
            {
                std::string name(to_string(c.command));
                std::replace(name.begin(), name.end(), '-', '_');
                c.output_path = name + ".csv";
            }
        }

        void validate(const RunConfig &c)
        {
            const ScenarioSpec &s = c.scenario;
            const bool estimating = c.command == Command::simulate || c.command == Command::sweep_snr ||
                                    c.command == Command::sweep_measurements;

            require(s.config.M() >= 1, "--m must be positive");
            require(s.config.N() >= 1, "--n must be positive");
            require(s.trials >= 1, "--trials must be positive");
            require(s.num_paths >= 1, "--paths must be positive");
            require(std::isfinite(s.offgrid_scale) && s.offgrid_scale >= 0.0 && s.offgrid_scale <= 1.0,
                    "--offgrid-scale must lie in [0, 1]");
            require(std::isfinite(s.min_separation_deg) && s.min_separation_deg >= 0.0 &&
                        s.min_separation_deg < 180.0,
                    "--min-sep-deg must lie in [0, 180)");
            require(c.threads >= 1, "--threads must be positive");
            if (c.epsilon)
                require(std::isfinite(*c.epsilon) && *c.epsilon > 0.0, "--epsilon must be positive");

            if (estimating)
            {
                require(!c.estimators.empty(), "--estimators must select at least one estimator");
                require(s.config.M() >= 3 && s.config.N() >= 3, "--m and --n must be at least 3 for estimation");
                for (double v : c.snr_db)
                    require(!std::isnan(v) && v != -INFINITY, "--snr-db values must be numbers above -inf");
                for (int v : c.measurements)
                    require(v >= 1, "--measurements values must be positive");
            }
            if (c.command == Command::lemma1)
                require(s.config.M() % 2 == 0 && s.config.N() % 2 == 0 && s.config.M() * s.config.N() >= 4,
                        "--m and --n must be even for lemma1");
            if (c.command == Command::kernel_dump)
                require(std::isfinite(c.offset.m) && std::isfinite(c.offset.n), "--offset must be finite");
        }

        std::ofstream open_output(const std::string &path)
        {
            std::ofstream os(path, std::ios::binary | std::ios::trunc);
            if (!os)
                throw UsageError("--out: cannot open '" + path + "' for writing");
            return os;
        }
    }

    std::string_view to_string(Command command) noexcept
    {
        switch (command)
        {
        case Command::simulate:
            return "simulate";
        case Command::sweep_snr:
            return "sweep-snr";
        case Command::sweep_measurements:
            return "sweep-measurements";
        case Command::lemma1:
            return "lemma1";
        case Command::kernel_dump:
            return "kernel-dump";
        }
        return "unknown";
    }

    std::optional<RunConfig> parse_config(int argc, const char *const *argv, std::ostream &out)
    {
        RunConfig c;
        int m = c.scenario.config.M();
        int n = c.scenario.config.N();
        std::vector<std::string> estimator_names;
        std::vector<double> offset{0.5, 0.5};
        std::optional<double> epsilon;
        c.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

        CLI::App app{"Off-grid beamspace channel estimation experiments", "domp"};
        app.set_config("--config", "", "Flat key=value file; flags given on the command line win");
        app.allow_config_extras(CLI::config_extras_mode::error);
        app.require_subcommand(1, 1);

        app.add_option("--m", m, "BS antennas / DFT grid size M")->capture_default_str();
        app.add_option("--n", n, "UE antennas / DFT grid size N")->capture_default_str();
        app.add_option("--paths", c.scenario.num_paths, "Multipath components per trial")->capture_default_str();
        app.add_option("--trials", c.scenario.trials, "Monte-Carlo trials per axis point")->capture_default_str();
        app.add_option("--seed", c.scenario.root_seed, "Root seed")->capture_default_str();
        app.add_option("--snr-db", c.snr_db, "SNR axis in dB (comma separated)")->delimiter(',');
        app.add_option("--measurements", c.measurements, "Measurement counts M_t*N_t (comma separated)")
            ->delimiter(',');
        app.add_option("--estimators", estimator_names, "Subset of omp,domp-mlb,domp-mslb,domp-lo")
            ->delimiter(',');
        app.add_option("--offgrid-scale", c.scenario.offgrid_scale, "Spread of the off-grid peaks around cell midpoints")
            ->capture_default_str();
        app.add_option("--min-sep-deg", c.scenario.min_separation_deg, "Minimum pairwise angle separation")
            ->capture_default_str();
        app.add_option("--epsilon", epsilon, "Fixed residual stopping tolerance");
        app.add_option("--threads", c.threads, "Worker threads");
        app.add_option("--out", c.output_path, "Output CSV path");
        app.add_option("--offset", offset, "kernel-dump peak offset in cells, m,n")->delimiter(',')->expected(2);

        const std::pair<Command, const char *> commands[] = {
            {Command::simulate, "Single SNR / measurement point, per-trial NMSE"},
            {Command::sweep_snr, "NMSE versus SNR"},
            {Command::sweep_measurements, "NMSE versus number of measurements"},
            {Command::lemma1, "Power captured by the K strongest beamspace elements"},
            {Command::kernel_dump, "|H_V| of one unit path"},
        };
        for (const auto &[cmd, help] : commands)
            app.add_subcommand(std::string(to_string(cmd)), help)->fallthrough();

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::CallForHelp &)
        {
            out << app.help();
            return std::nullopt;
        }
        catch (const CLI::CallForAllHelp &)
        {
            out << app.help("", CLI::AppFormatMode::All);
            return std::nullopt;
        }
        catch (const CLI::ParseError &e)
        {
            throw UsageError(e.what());
        }

        for (const auto &[cmd, help] : commands)
            if (app.got_subcommand(std::string(to_string(cmd))))
                c.command = cmd;

        if (m < 1 || n < 1)
            throw UsageError(m < 1 ? "--m must be positive" : "--n must be positive");
        c.scenario.config = UlaConfig(m, n);
        c.epsilon = epsilon;
        c.offset = CellOffsets{offset.at(0), offset.at(1)};

        if (!estimator_names.empty())
        {
            c.estimators.clear();
            for (const auto &name : estimator_names)
            {
                const auto kind = parse_estimator(name);
                if (!kind)
                    throw UsageError("--estimators: unknown estimator '" + name + "'");
                if (std::find(c.estimators.begin(), c.estimators.end(), *kind) == c.estimators.end())
                    c.estimators.push_back(*kind);
            }
        }

        apply_command_defaults(c);
        validate(c);
        return c;
    }

    std::string header_comment(const RunConfig &c)
    {
        const ScenarioSpec &s = c.scenario;
        const EstimatorConfig e{};
        std::ostringstream os;
        os << "# domp " << to_string(c.command) << '\n';
        os << "# m=" << s.config.M() << '\n';
        os << "# n=" << s.config.N() << '\n';
        os << "# element-spacing=" << num(s.config.element_spacing_wavelengths) << '\n';
        os << "# paths=" << s.num_paths << '\n';
        os << "# trials=" << s.trials << '\n';
        os << "# seed=" << s.root_seed << '\n';
        os << "# snr-db=" << join(c.snr_db, num) << '\n';
        os << "# measurements=" << join(c.measurements, [](int v) { return std::to_string(v); }) << '\n';
        os << "# estimators="
           << join(c.estimators, [](EstimatorKind k) { return std::string(domp::to_string(k)); }) << '\n';
        os << "# offgrid-scale=" << num(s.offgrid_scale) << '\n';
        os << "# min-sep-deg=" << num(s.min_separation_deg) << '\n';
        os << "# gain-model=" << gain_name(s.gain_model) << '\n';
        os << "# placement=" << placement_name(s.placement) << '\n';
        os << "# epsilon=" << (c.epsilon ? num(*c.epsilon) : std::string("noise-floor")) << '\n';
        os << "# offset=" << num(c.offset.m) << ',' << num(c.offset.n) << '\n';
        os << "# lo-grid-step=" << num(e.lo_grid_step) << '\n';
        os << "# lo-refine-iters=" << e.lo_refine_iters << '\n';
        os << "# refit-sweeps=" << e.refit_sweeps << '\n';
        os << "# omp-iteration-factor=" << e.omp_iteration_factor << '\n';
        return os.str();
    }

    void write_trials_csv(std::ostream &os, const RunConfig &config, const SweepResult &result)
    {
        os << header_comment(config);
        os << "# axis=" << result.axis_name << '\n';
        os << "axis_value,estimator,trial,nmse,iterations,final_residual\n";
        for (const TrialRecord &r : result.records)
        {
            os << num(r.axis_value) << ',' << domp::to_string(r.estimator) << ',' << r.trial << ','
               << (r.ok ? num(r.nmse) : "nan") << ',' << r.iterations << ','
               << (r.ok ? num(r.final_residual) : "nan") << '\n';
        }
    }

    void write_summary_csv(std::ostream &os, const RunConfig &config, const SweepResult &result)
    {
        os << header_comment(config);
        os << "# axis=" << result.axis_name << '\n';
        os << "axis_value,estimator,mean_nmse,stderr_nmse,n_trials\n";
        for (const AxisPoint &p : result.points)
            for (const EstimatorSummary &s : p.summaries)
                os << num(p.axis_value) << ',' << domp::to_string(s.estimator) << ',' << num(s.mean_nmse) << ','
                   << num(s.stderr_nmse) << ',' << s.n_trials << '\n';
    }

    void write_lemma1_csv(std::ostream &os, const RunConfig &config)
    {
        const int m = config.scenario.config.M();
        const int n = config.scenario.config.N();
        os << header_comment(config);
        os << "K,eta_best,eta_worst_oracle,eta_worst_closed\n";
        for (int k = 1; k <= m * n / 4; ++k)
        {
            const double best = power_capture_oracle(m, n, CellOffsets{0.0, 0.0}, k);
            const double worst = power_capture_oracle(m, n, CellOffsets{0.5, 0.5}, k);
            // The closed form is defined for multiples of 4 only
            const std::string closed = k % 4 == 0 ? num(power_capture_closed_form(m, n, k)) : "nan";
            os << k << ',' << num(best) << ',' << num(worst) << ',' << closed << '\n';
        }
    }

    void write_kernel_csv(std::ostream &os, const RunConfig &config)
    {
        const UlaConfig &ula = config.scenario.config;
        // Peak near the middle of the grid so the lobes are not split by the wrap
        const VirtualPeak peak{wrap_coordinate(ula.M() / 2 + config.offset.m, ula.M()),
                               wrap_coordinate(ula.N() / 2 + config.offset.n, ula.N()), Complex{1.0, 0.0}};
        const BeamspaceMatrix hv = dirichlet_atom(peak, ula);
        os << header_comment(config);
        os << "m,n,magnitude\n";
        for (int m = 1; m <= ula.M(); ++m)
            for (int n = 1; n <= ula.N(); ++n)
                os << m << ',' << n << ',' << num(std::abs(hv.at(m, n))) << '\n';
    }

    std::string summary_path(const std::string &trials_path)
    {
        const std::filesystem::path p(trials_path);
        return (p.parent_path() / (p.stem().string() + "_summary" + p.extension().string())).string();
    }

    int run(const RunConfig &config, std::ostream &out, std::ostream &err)
    {
        try
        {
            if (config.command == Command::lemma1 || config.command == Command::kernel_dump)
            {
                std::ofstream os = open_output(config.output_path);
                if (config.command == Command::lemma1)
                    write_lemma1_csv(os, config);
                else
                    write_kernel_csv(os, config);
                os.close();
                if (!os)
                    throw std::runtime_error("failed writing '" + config.output_path + "'");
                out << "wrote " << config.output_path << '\n';
                return exit_ok;
            }

            std::ofstream trials_os = open_output(config.output_path);
            const std::string summary_file = summary_path(config.output_path);
            std::ofstream summary_os = open_output(summary_file);

            SweepOptions options;
            options.estimators = config.estimators;
            options.epsilon = config.epsilon;
            options.threads = config.threads;
            options.on_point = [&](const AxisPoint &p) {
                out << (config.command == Command::sweep_measurements ? "measurements=" : "snr_db=")
                    << p.axis_value;
                for (const EstimatorSummary &s : p.summaries)
                {
                    out << "  " << domp::to_string(s.estimator) << ' '
                        << (s.n_trials > 0 ? db(s.mean_nmse) + " dB" : std::string("n/a"));
                    if (s.n_failed > 0)
                        out << " (" << s.n_failed << " failed)";
                }
                out << std::endl;
            };

            SweepResult result;
            switch (config.command)
            {
            case Command::simulate:
                result = sweep_snr(config.scenario, std::span(config.snr_db.data(), 1), config.measurements.front(),
                                   options);
                break;
            case Command::sweep_snr:
                result = sweep_snr(config.scenario, config.snr_db, config.measurements.front(), options);
                break;
            default:
                result = sweep_measurements(config.scenario, config.measurements, config.snr_db.front(), options);
                break;
            }

            int failed = 0;
            for (const TrialRecord &r : result.records)
                if (!r.ok && ++failed)
                    err << "trial " << r.trial << " at " << result.axis_name << '=' << num(r.axis_value) << " ("
                        << domp::to_string(r.estimator) << ") failed: " << r.failure << '\n';

            write_trials_csv(trials_os, config, result);
            write_summary_csv(summary_os, config, result);
            trials_os.close();
            summary_os.close();
            if (!trials_os || !summary_os)
                throw std::runtime_error("failed writing the output files");
            out << "wrote " << config.output_path << " and " << summary_file << '\n';
            if (failed > 0)
            {
                err << "runtime error: " << failed << " of " << result.records.size()
                    << " estimator runs failed (rows with nmse=nan)\n";
                return exit_runtime;
            }
            return exit_ok;
        }
        catch (const UsageError &e)
        {
            err << "usage error: " << e.what() << '\n';
            return exit_usage;
        }
        catch (const ScenarioError &e)
        {
            err << "scenario error: " << e.what() << '\n';
            return exit_runtime;
        }
        catch (const SingularityError &e)
        {
            err << "singularity error: " << e.what() << '\n';
            return exit_runtime;
        }
        catch (const std::exception &e)
        {
            err << "runtime error: " << e.what() << '\n';
            return exit_runtime;
        }
    }

    int main(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        std::optional<RunConfig> config;
        try
        {
            config = parse_config(argc, argv, out);
        }
        catch (const UsageError &e)
        {
            err << "usage error: " << e.what() << "\nrun with --help for the list of options\n";
            return exit_usage;
        }
        if (!config)
            return exit_ok;
        return run(*config, out, err);
    }
}
