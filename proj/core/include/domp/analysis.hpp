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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "domp/channel_model.hpp"
#include "domp/estimators.hpp"

namespace domp
{
    // ----- power captured by the K strongest beamspace elements --------------

    // Fractional distance (in cells) of a single path's Dirichlet peak from the
    // nearest grid point below it; (0.5, 0.5) is the worst case.
    struct CellOffsets
    {
        double m = 0.0;
        double n = 0.0;
    };

    // Brute force: synthesise the unit-path beamspace from the Dirichlet kernel,
    // sort the squared magnitudes and return (top K) / (total).
    double power_capture_oracle(int m, int n, CellOffsets offsets, int k);

    // Worst-case (half-cell) power capture in closed form. Requires even M, N
    // and K a multiple of 4. Uses the 4-fold symmetry of the half-cell kernel:
    // the quadrant element (i, j) has power
    //   1 / (M^2 N^2 sin^2(pi (2i-1) / (2M)) sin^2(pi (2j-1) / (2N))),
    // each appearing four times; P_K sums the K/4 largest quadrant terms and
    // P_T all of them (i <= M/2, j <= N/2).
    double power_capture_closed_form(int m, int n, int k);

    // ----- scenarios -------------------------------------------------------------

    enum class GainModel
    {
        unit,
        complex_gaussian,
    };

    enum class Placement
    {
        off_grid, // near the midpoint between adjacent grid angles
        on_grid,  // exactly on grid angles
    };

    struct ScenarioSpec
    {
        UlaConfig config{32, 32};
        int num_paths = 3;
        double offgrid_scale = 0.1;
        double min_separation_deg = 20.0;
        GainModel gain_model = GainModel::complex_gaussian;
        Placement placement = Placement::off_grid;
        int trials = 50;
        std::uint64_t root_seed = 0;

        void validate() const;
    };

    // Seed of trial `trial_index` (root seed mixed with the index)
    std::uint64_t trial_seed(const ScenarioSpec &spec, int trial_index);

    // Off-grid placement: for each path pick a random cell k in each dimension,
    // put the virtual peak at the midpoint k + 1/2 and move it by
    // +-scale*zeta/2 cells (zeta ~ U[0, 1], random sign), then map back to the
    // physical angle. Paths are redrawn until every pair is at least
    // min_separation_deg apart in both AoA and AoD.
    PhysicalChannel generate_offgrid_scenario(const ScenarioSpec &spec, int trial_index);

    // ||H_hat - H||_F^2 / ||H||_F^2
    double nmse(const CMatrix &estimate, const CMatrix &truth);

    // ----- Monte-Carlo sweeps ------------------------------------------------------

    struct TrialRecord
    {
        double axis_value = 0.0;
        EstimatorKind estimator = EstimatorKind::omp;
        int trial = 0;
        double nmse = 0.0;
        int iterations = 0;
        double final_residual = 0.0;
        bool ok = true;
        std::string failure; // error category and message when !ok
    };

    struct EstimatorSummary
    {
        EstimatorKind estimator = EstimatorKind::omp;
        double mean_nmse = 0.0;
        double stderr_nmse = 0.0;
        int n_trials = 0; // successful trials averaged
        int n_failed = 0;
    };

    struct AxisPoint
    {
        double axis_value = 0.0;
        int num_precoders = 0;
        int num_combiners = 0;
        double snr_db = 0.0;
        std::vector<EstimatorSummary> summaries; // in SweepOptions::estimators order
    };

    struct SweepResult
    {
        std::string axis_name; // "snr_db" or "measurements"
        std::vector<AxisPoint> points;
        std::vector<TrialRecord> records; // ordered by (axis point, trial, estimator)

        const EstimatorSummary &summary(std::size_t point, EstimatorKind kind) const;
    };

    struct SweepOptions
    {
        std::vector<EstimatorKind> estimators{std::begin(all_estimators), std::end(all_estimators)};
        EstimatorConfig estimator_config{};       // max_paths is overridden by the scenario's path count
        std::optional<double> epsilon;            // fixed residual tolerance; default is the noise-floor rule
        int threads = 1;
        std::function<void(const AxisPoint &)> on_point; // called in axis order after each point completes
    };

    // Square split of a measurement budget: M_t = N_t = round(sqrt(total))
    std::pair<int, int> split_measurements(int total);

    // Everything needed to evaluate one trial at one axis point
    struct TrialInputs
    {
        PhysicalChannel channel;
        SensingSetup setup;
        Observation observation;
    };

    TrialInputs make_trial(const ScenarioSpec &spec, int trial_index, int num_precoders, int num_combiners,
                           double snr_db, int axis_index);

    SweepResult sweep_snr(const ScenarioSpec &spec, std::span<const double> snr_db, int measurements_total,
                          const SweepOptions &options);

    SweepResult sweep_measurements(const ScenarioSpec &spec, std::span<const int> measurements, double snr_db,
                                   const SweepOptions &options);
}
