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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "domp/analysis.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace domp;

namespace
{
    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }
    double db(double v) { return 10.0 * std::log10(v); }

    int failures = 0;

    void report(int id, const char *name, bool pass, const std::string &detail)
    {
        std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
        std::fflush(stdout);
        failures += !pass;
    }

    std::string format(const char *fmt, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        return buf;
    }

    int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

    // LO <= MSLb <= MLb < OMP on the mean NMSE of one axis point
    bool ordered(const SweepResult &r, std::size_t point, std::string &detail)
    {
        const double omp = r.summary(point, EstimatorKind::omp).mean_nmse;
        const double mlb = r.summary(point, EstimatorKind::domp_mlb).mean_nmse;
        const double mslb = r.summary(point, EstimatorKind::domp_mslb).mean_nmse;
        const double lo = r.summary(point, EstimatorKind::domp_lo).mean_nmse;
        detail += format(" [%s=%g: omp %.2f, mlb %.2f, mslb %.2f, lo %.2f dB]", r.axis_name.c_str(),
                         r.points[point].axis_value, db(omp), db(mlb), db(mslb), db(lo));
        return lo <= mslb && mslb <= mlb && mlb < omp;
    }

    bool all_succeeded(const SweepResult &r)
    {
        return std::all_of(r.records.begin(), r.records.end(), [](const TrialRecord &t) { return t.ok; });
    }

    void lemma1()
    {
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (int k = 4; k <= 64; k += 4)
            worst = std::max(worst, std::abs(power_capture_closed_form(16, 16, k) -
                                             power_capture_oracle(16, 16, CellOffsets{0.5, 0.5}, k)));
        const double t = seconds_since(t0);
        report(1, "lemma1-oracle-equivalence", worst < 1e-9 && t < 1.0,
               format("max |closed - oracle| = %.3g over K = 4..64 (M = N = 16), %.3f s", worst, t));
    }

    void on_grid()
    {
        const auto t0 = Clock::now();
        ScenarioSpec spec;
        spec.config = UlaConfig(16, 16);
        spec.placement = Placement::on_grid;
        spec.trials = 50;
        double worst_nmse[4] = {0, 0, 0, 0};
        double worst_offset = 0.0;
        int errors = 0;
        for (int t = 0; t < spec.trials; ++t)
        {
            const TrialInputs in = make_trial(spec, t, 10, 10, INFINITY, 0);
            EstimatorConfig c;
            c.max_paths = spec.num_paths;
            c.residual_tolerance = noise_floor_tolerance(in.observation.y, INFINITY);
            for (int e = 0; e < 4; ++e)
            {
                try
                {
                    const EstimateResult r = run_estimator(all_estimators[e], in.observation.y, in.setup, c);
                    worst_nmse[e] = std::max(worst_nmse[e], nmse(r.channel, in.channel.matrix));
                    if (all_estimators[e] != EstimatorKind::omp)
                        for (const auto &[dm, dn] : r.offsets(spec.config))
                            worst_offset = std::max({worst_offset, std::abs(dm), std::abs(dn)});
                }
                catch (const std::exception &)
                {
                    ++errors;
                }
            }
        }
        const double t = seconds_since(t0);
        const bool pass = errors == 0 && *std::max_element(worst_nmse, worst_nmse + 4) < 1e-6 &&
                          worst_offset <= 0.05 && t < 10.0;
        report(2, "on-grid-degeneracy", pass,
               format("worst NMSE omp %.2g, mlb %.2g, mslb %.2g, lo %.2g; max |delta| %.2g; %d errors; %.1f s",
                      worst_nmse[0], worst_nmse[1], worst_nmse[2], worst_nmse[3], worst_offset, errors, t));
    }

    SweepResult snr_sweep;

    void offgrid_ordering()
    {
        const auto t0 = Clock::now();
        ScenarioSpec spec; // M = N = 32, 3 paths, 50 trials, off-grid
        SweepOptions opt;
        opt.threads = threads();
        const std::vector<double> snr{0.0, 10.0, 20.0, 30.0};
        snr_sweep = sweep_snr(spec, snr, 100, opt);
        std::string detail;
        bool pass = all_succeeded(snr_sweep);
        for (std::size_t p = 1; p < snr.size(); ++p)
            pass = ordered(snr_sweep, p, detail) && pass;
        double gap = INFINITY;
        for (EstimatorKind k : {EstimatorKind::domp_mlb, EstimatorKind::domp_mslb, EstimatorKind::domp_lo})
            gap = std::min(gap, db(snr_sweep.summary(2, EstimatorKind::omp).mean_nmse) -
                                    db(snr_sweep.summary(2, k).mean_nmse));
        const double t = seconds_since(t0);
        pass = pass && gap >= 3.0 && t < 600.0;
        report(3, "off-grid-snr-ordering", pass,
               format("smallest OMP-vs-DOMP gap at 20 dB %.2f dB; %.1f s;", gap, t) + detail);
    }

    void measurement_sweep()
    {
        const auto t0 = Clock::now();
        ScenarioSpec spec;
        SweepOptions opt;
        opt.threads = threads();
        const std::vector<int> meas{36, 64, 100, 144, 196};
        const SweepResult r = sweep_measurements(spec, meas, 20.0, opt);
        bool pass = all_succeeded(r);
        std::string detail;
        for (EstimatorKind k : all_estimators)
        {
            int violations = 0;
            for (std::size_t p = 1; p < meas.size(); ++p)
                violations += r.summary(p, k).mean_nmse > r.summary(p - 1, k).mean_nmse;
            detail += format(" %s increases %d;", std::string(to_string(k)).c_str(), violations);
            pass = pass && violations <= 1;
        }
        for (std::size_t p = 2; p < meas.size(); ++p)
            pass = ordered(r, p, detail) && pass;
        report(4, "measurement-sweep", pass, format("%.1f s;", seconds_since(t0)) + detail);
    }

    void single_path_localization()
    {
        const UlaConfig cfg(16, 16);
        const SensingSetup s = full_sampling_setup(cfg);
        Rng rng(derive_seed(0, 5));
        std::uniform_real_distribution<double> sine(-1.0, 1.0);
        double worst[3] = {0, 0, 0};
        const EstimatorKind kinds[3] = {EstimatorKind::domp_lo, EstimatorKind::domp_mslb, EstimatorKind::domp_mlb};
        int errors = 0;
        for (int t = 0; t < 200; ++t)
        {
            const std::vector<MultipathComponent> p{{Complex(1, 0), std::asin(sine(rng)), std::asin(sine(rng))}};
            const CVector y = measure(build_channel(cfg, p), s, INFINITY, 0).y;
            const auto [m_ref, n_ref] = oracle::single_path_peak(16, 16, p[0].aod, p[0].aoa);
            EstimatorConfig c;
            c.max_paths = 1;
            c.residual_tolerance = noise_floor_tolerance(y, INFINITY);
            for (int e = 0; e < 3; ++e)
            {
                try
                {
                    const EstimateResult r = run_estimator(kinds[e], y, s, c);
                    if (r.paths.size() != 1)
                    {
                        ++errors;
                        continue;
                    }
                    worst[e] = std::max({worst[e], oracle::circular_distance(r.paths[0].m_star, m_ref, 16),
                                         oracle::circular_distance(r.paths[0].n_star, n_ref, 16)});
                }
                catch (const std::exception &)
                {
                    ++errors;
                }
            }
        }
        const bool pass = errors == 0 && worst[0] <= 1e-3 && worst[1] <= 0.05 && worst[2] <= 0.15;
        report(5, "single-path-localization", pass,
               format("max cell error vs dense DTFT: lo %.2g (<= 1e-3), mslb %.3g (<= 0.05), mlb %.3g (<= 0.15); "
                      "%d errors",
                      worst[0], worst[1], worst[2], errors));
    }

    void properties()
    {
        const auto outcomes = props::run_all(100, 2026);
        bool pass = true;
        std::string detail;
        for (const auto &o : outcomes)
        {
            pass = pass && o.passed();
            detail += format(" %s %d/%d;", o.name.c_str(), o.cases - o.failures, o.cases);
            if (!o.passed())
                detail += " first failure: " + o.first_failure + ";";
        }
        report(6, "property-suites", pass, detail);
    }
}

// With no arguments every criterion runs; otherwise only the listed ids.
int main(int argc, char **argv)
{
    void (*const criteria[])() = {lemma1, on_grid, offgrid_ordering, measurement_sweep, single_path_localization,
                                  properties};
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i)
    {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > 6)
        {
            std::fprintf(stderr, "unknown criterion '%s' (expected 1..6)\n", argv[i]);
            return 2;
        }
        selected.push_back(id);
    }
    if (selected.empty())
        selected = {1, 2, 3, 4, 5, 6};
    for (int id : selected)
        criteria[id - 1]();
    std::printf("%d of %zu criteria failed\n", failures, selected.size());
    return failures == 0 ? 0 : 1;
}
