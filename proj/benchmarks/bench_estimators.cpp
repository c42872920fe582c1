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

#include <benchmark/benchmark.h>

#include "domp/analysis.hpp"

namespace
{
    using namespace domp;

    TrialInputs paper_trial(int grid, int measurements)
    {
        ScenarioSpec spec;
        spec.config = UlaConfig(grid, grid);
        const auto [mt, nt] = split_measurements(measurements);
        return make_trial(spec, 0, mt, nt, 20.0, 0);
    }

    void BM_SensingSetup(benchmark::State &state)
    {
        const int grid = static_cast<int>(state.range(0));
        const UlaConfig cfg(grid, grid);
        const Beamformers bf = random_beamformers(cfg, 10, 10, 1);
        for (auto _ : state)
            benchmark::DoNotOptimize(make_sensing_setup(cfg, bf.precoder, bf.combiner));
    }
    BENCHMARK(BM_SensingSetup)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

    void BM_Estimator(benchmark::State &state)
    {
        const auto kind = static_cast<EstimatorKind>(state.range(0));
        const TrialInputs trial = paper_trial(static_cast<int>(state.range(1)), 100);
        EstimatorConfig config;
        config.residual_tolerance = noise_floor_tolerance(trial.observation.y, 20.0);
        for (auto _ : state)
            benchmark::DoNotOptimize(run_estimator(kind, trial.observation.y, trial.setup, config));
        state.SetLabel(std::string(to_string(kind)));
    }
    BENCHMARK(BM_Estimator)
        ->ArgsProduct({{0, 1, 2, 3}, {16, 32}})
        ->Unit(benchmark::kMillisecond);

    void BM_PowerCaptureOracle(benchmark::State &state)
    {
        const int grid = static_cast<int>(state.range(0));
        for (auto _ : state)
            benchmark::DoNotOptimize(power_capture_oracle(grid, grid, CellOffsets{0.5, 0.5}, grid));
    }
    BENCHMARK(BM_PowerCaptureOracle)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);
}

BENCHMARK_MAIN();
