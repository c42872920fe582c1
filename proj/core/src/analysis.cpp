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

#include "domp/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "domp/random.hpp"

namespace domp
{
    namespace
    {
        constexpr int max_scenario_draws = 10000;

        double top_k_fraction(std::vector<double> powers, int k)
        {
            std::sort(powers.begin(), powers.end(), std::greater<>());
            double total = 0.0;
            for (double p : powers)
                total += p;
            double top = 0.0;
            for (int i = 0; i < k; ++i)
                top += powers[static_cast<std::size_t>(i)];
            return top / total;
        }

        std::string failure_text(const std::exception_ptr &error)
        {
            try
            {
                std::rethrow_exception(error);
            }
            catch (const SingularityError &e)
            {
                return std::string("singularity: ") + e.what();
            }
            catch (const DegenerateInputError &e)
            {
                return std::string("degenerate: ") + e.what();
            }
            catch (const ScenarioError &e)
            {
                return std::string("scenario: ") + e.what();
            }
            catch (const DomainError &e)
            {
                return std::string("domain: ") + e.what();
            }
            catch (const std::exception &e)
            {
                return std::string("runtime: ") + e.what();
            }
            catch (...)
            {
                return "runtime: unknown error";
            }
        }

        struct AxisSetting
        {
            double axis_value;
            int num_precoders;
            int num_combiners;
            double snr_db;
        };

        SweepResult run_sweep(const ScenarioSpec &spec, std::string axis_name, const std::vector<AxisSetting> &axis,
                              const SweepOptions &options)
        {
            spec.validate();
            if (options.estimators.empty())
                throw DomainError("a sweep needs at least one estimator");
            if (options.epsilon && !(*options.epsilon > 0.0))
                throw DomainError("epsilon must be positive");

            const std::size_t n_points = axis.size();
            const std::size_t n_trials = static_cast<std::size_t>(spec.trials);
            const std::size_t n_est = options.estimators.size();

            // records[(point * trials + trial) * n_est + estimator]
            std::vector<TrialRecord> records(n_points * n_trials * n_est);

            auto run_task = [&](std::size_t task) {
                const std::size_t point = task / n_trials;
                const int trial = static_cast<int>(task % n_trials);
                const AxisSetting &setting = axis[point];
                TrialRecord *out = &records[task * n_est];
                for (std::size_t e = 0; e < n_est; ++e)
                {
                    out[e].axis_value = setting.axis_value;
                    out[e].estimator = options.estimators[e];
                    out[e].trial = trial;
                }

                std::optional<TrialInputs> inputs;
                try
                {
                    inputs.emplace(make_trial(spec, trial, setting.num_precoders, setting.num_combiners,
                                              setting.snr_db, static_cast<int>(point)));
                }
                catch (...)
                {
                    const std::string why = failure_text(std::current_exception());
                    for (std::size_t e = 0; e < n_est; ++e)
                    {
                        out[e].ok = false;
                        out[e].failure = why;
                    }
                    return;
                }

                // Every estimator sees the identical observation
                EstimatorConfig config = options.estimator_config;
                config.max_paths = spec.num_paths;
                config.residual_tolerance =
                    options.epsilon ? *options.epsilon : noise_floor_tolerance(inputs->observation.y, setting.snr_db);

                for (std::size_t e = 0; e < n_est; ++e)
                {
                    try
                    {
                        const EstimateResult r =
                            run_estimator(options.estimators[e], inputs->observation.y, inputs->setup, config);
                        out[e].nmse = nmse(r.channel, inputs->channel.matrix);
                        out[e].iterations = r.iterations;
                        out[e].final_residual = r.residual_history.empty() ? inputs->observation.y.norm()
                                                                           : r.final_residual();
                    }
                    catch (...)
                    {
                        out[e].ok = false;
                        out[e].failure = failure_text(std::current_exception());
                    }
                }
            };

            const std::size_t n_tasks = n_points * n_trials;
            const int threads = std::max(1, options.threads);
            if (threads == 1)
            {
                for (std::size_t t = 0; t < n_tasks; ++t)
                    run_task(t);
            }
            else
            {
                std::atomic<std::size_t> next{0};
                std::vector<std::jthread> pool;
                for (int w = 0; w < threads; ++w)
                    pool.emplace_back([&] {
                        for (std::size_t t = next++; t < n_tasks; t = next++)
                            run_task(t);
                    });
            }

            SweepResult result;
            result.axis_name = std::move(axis_name);
            for (std::size_t p = 0; p < n_points; ++p)
            {
                AxisPoint point{axis[p].axis_value, axis[p].num_precoders, axis[p].num_combiners, axis[p].snr_db, {}};
                for (std::size_t e = 0; e < n_est; ++e)
                {
                    EstimatorSummary s;
                    s.estimator = options.estimators[e];
                    double sum = 0.0;
                    for (std::size_t t = 0; t < n_trials; ++t)
                    {
                        const TrialRecord &r = records[(p * n_trials + t) * n_est + e];
                        if (r.ok)
                        {
                            sum += r.nmse;
                            ++s.n_trials;
                        }
                        else
                            ++s.n_failed;
                    }
                    if (s.n_trials > 0)
                    {
                        s.mean_nmse = sum / s.n_trials;
                        double ss = 0.0;
                        for (std::size_t t = 0; t < n_trials; ++t)
                        {
                            const TrialRecord &r = records[(p * n_trials + t) * n_est + e];
                            if (r.ok)
                                ss += (r.nmse - s.mean_nmse) * (r.nmse - s.mean_nmse);
                        }
                        if (s.n_trials > 1)
                            s.stderr_nmse = std::sqrt(ss / (s.n_trials - 1)) / std::sqrt(static_cast<double>(s.n_trials));
                    }
                    else
                        s.mean_nmse = std::numeric_limits<double>::quiet_NaN();
                    point.summaries.push_back(s);
                }
                if (options.on_point)
                    options.on_point(point);
                result.points.push_back(std::move(point));
            }
            result.records = std::move(records);
            return result;
        }
    }

    double power_capture_oracle(int m, int n, CellOffsets offsets, int k)
    {
        if (m < 1 || n < 1)
            throw DomainError("grid sizes must be positive");
        if (k < 1 || static_cast<long long>(k) > static_cast<long long>(m) * n)
            throw DomainError("K must lie in [1, M*N]");

        // Unit path with its peak at (1 + offset_m, 1 + offset_n); kernel arguments (m' - m*) / M
        const double m_star = 1.0 + offsets.m;
        const double n_star = 1.0 + offsets.n;
        std::vector<double> powers;
        powers.reserve(static_cast<std::size_t>(m) * n);
        for (int mc = 1; mc <= m; ++mc)
            for (int nc = 1; nc <= n; ++nc)
            {
                const double d = dirichlet_kernel((mc - m_star) / m, (nc - n_star) / n, m, n);
                powers.push_back(d * d);
            }
        return top_k_fraction(std::move(powers), k);
    }

    double power_capture_closed_form(int m, int n, int k)
    {
        if (m < 2 || n < 2 || m % 2 != 0 || n % 2 != 0)
            throw DomainError("closed-form power capture needs even M and N");
        if (k < 4 || k % 4 != 0 || static_cast<long long>(k) > static_cast<long long>(m) * n)
            throw DomainError("K must be a positive multiple of 4 not exceeding M*N");

        const double mn = static_cast<double>(m) * n;
        std::vector<double> quadrant;
        quadrant.reserve(static_cast<std::size_t>(m / 2) * (n / 2));
        for (int i = 1; i <= m / 2; ++i)
        {
            const double si = std::sin(pi * (2 * i - 1) / (2.0 * m));
            for (int j = 1; j <= n / 2; ++j)
            {
                const double sj = std::sin(pi * (2 * j - 1) / (2.0 * n));
                quadrant.push_back(4.0 / (mn * mn * si * si * sj * sj));
            }
        }
        return top_k_fraction(std::move(quadrant), k / 4);
    }

    void ScenarioSpec::validate() const
    {
        config.validate();
        if (num_paths < 1)
            throw DomainError("a scenario needs at least one path");
        if (!(offgrid_scale >= 0.0) || offgrid_scale > 1.0)
            throw DomainError("offgrid_scale must lie in [0, 1]");
        if (!(min_separation_deg >= 0.0) || min_separation_deg > 180.0)
            throw DomainError("min_separation_deg must lie in [0, 180]");
        if (trials < 1)
            throw DomainError("trials must be positive");
    }

    std::uint64_t trial_seed(const ScenarioSpec &spec, int trial_index)
    {
        return derive_seed(spec.root_seed, static_cast<std::uint64_t>(trial_index));
    }

    PhysicalChannel generate_offgrid_scenario(const ScenarioSpec &spec, int trial_index)
    {
        spec.validate();
        const UlaConfig &ula = spec.config;
        const double d = ula.element_spacing_wavelengths;
        const double min_sep = spec.min_separation_deg * pi / 180.0;

        Rng rng(derive_seed(trial_seed(spec, trial_index), 0));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::bernoulli_distribution coin(0.5);

        auto draw_angle = [&](int size) {
            std::uniform_int_distribution<int> cell_dist(1, size);
            const int cell = cell_dist(rng);
            double x = cell;
            if (spec.placement == Placement::off_grid)
            {
                const double zeta = unit(rng);
                const double sign = coin(rng) ? 1.0 : -1.0;
                x = cell + 0.5 + sign * spec.offgrid_scale * zeta / 2.0;
            }
            return std::asin(sine_from_coordinate(x, size, d));
        };

        std::vector<MultipathComponent> paths;
        int draws = 0;
        while (static_cast<int>(paths.size()) < spec.num_paths)
        {
            if (++draws > max_scenario_draws)
                throw ScenarioError("could not place paths with the requested separation after " +
                                    std::to_string(max_scenario_draws) + " draws");
            MultipathComponent candidate;
            candidate.aod = draw_angle(ula.M());
            candidate.aoa = draw_angle(ula.N());
            const bool separated = std::all_of(paths.begin(), paths.end(), [&](const MultipathComponent &p) {
                return std::abs(p.aod - candidate.aod) >= min_sep && std::abs(p.aoa - candidate.aoa) >= min_sep;
            });
            if (separated)
                paths.push_back(candidate);
        }

        if (spec.gain_model == GainModel::complex_gaussian)
        {
            std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
            double energy = 0.0;
            for (auto &p : paths)
            {
                const double re = gauss(rng);
                const double im = gauss(rng);
                p.gain = Complex(re, im);
                energy += std::norm(p.gain);
            }
            // sum |alpha|^2 = L in every trial
            const double scale = std::sqrt(static_cast<double>(paths.size()) / energy);
            for (auto &p : paths)
                p.gain *= scale;
        }
        else
        {
            for (auto &p : paths)
                p.gain = Complex(1.0, 0.0);
        }
        return build_channel(ula, paths);
    }

    double nmse(const CMatrix &estimate, const CMatrix &truth)
    {
        if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
            throw DomainError("NMSE needs matrices of equal size");
        const double denom = truth.squaredNorm();
        if (!(denom > 0.0))
            throw DomainError("NMSE is undefined for a zero channel");
        return (estimate - truth).squaredNorm() / denom;
    }

    const EstimatorSummary &SweepResult::summary(std::size_t point, EstimatorKind kind) const
    {
        for (const auto &s : points.at(point).summaries)
            if (s.estimator == kind)
                return s;
        throw DomainError("estimator not part of this sweep");
    }

    std::pair<int, int> split_measurements(int total)
    {
        if (total < 1)
            throw DomainError("measurement count must be positive");
        const int side = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(total)))));
        return {side, side};
    }

    TrialInputs make_trial(const ScenarioSpec &spec, int trial_index, int num_precoders, int num_combiners,
                           double snr_db, int axis_index)
    {
        const std::uint64_t seed = trial_seed(spec, trial_index);
        PhysicalChannel channel = generate_offgrid_scenario(spec, trial_index);
        Beamformers bf = random_beamformers(spec.config, num_precoders, num_combiners, derive_seed(seed, 1));
        SensingSetup setup = make_sensing_setup(spec.config, std::move(bf.precoder), std::move(bf.combiner));
        Observation obs =
            measure(channel, setup, snr_db, derive_seed(seed, 2 + static_cast<std::uint64_t>(axis_index)));
        return TrialInputs{std::move(channel), std::move(setup), std::move(obs)};
    }

    SweepResult sweep_snr(const ScenarioSpec &spec, std::span<const double> snr_db, int measurements_total,
                          const SweepOptions &options)
    {
        if (snr_db.empty())
            throw DomainError("SNR list is empty");
        const auto [mt, nt] = split_measurements(measurements_total);
        std::vector<AxisSetting> axis;
        for (double s : snr_db)
            axis.push_back({s, mt, nt, s});
        return run_sweep(spec, "snr_db", axis, options);
    }

    SweepResult sweep_measurements(const ScenarioSpec &spec, std::span<const int> measurements, double snr_db,
                                   const SweepOptions &options)
    {
        if (measurements.empty())
            throw DomainError("measurement list is empty");
        std::vector<AxisSetting> axis;
        for (int total : measurements)
        {
            const auto [mt, nt] = split_measurements(total);
            axis.push_back({static_cast<double>(total), mt, nt, snr_db});
        }
        return run_sweep(spec, "measurements", axis, options);
    }
}
