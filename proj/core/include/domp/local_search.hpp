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

#include <functional>

namespace domp
{
    struct LineMinimum
    {
        double x = 0.0;
        double value = 0.0;
    };

    // Golden-section search for a minimum of a unimodal f on [lower, upper].
    // Runs exactly `iterations` bracket reductions (each shrinks the bracket by
    // 1/phi) and returns the best point evaluated, including both end points.
    LineMinimum golden_section_minimize(const std::function<double(double)> &f, double lower, double upper, int iterations);
}
