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

#include <optional>

#include "domp/types.hpp"

namespace domp
{
    CMatrix kronecker(const CMatrix &a, const CMatrix &b);

    // Least-squares solution of min ||A x - b||, or nullopt if A has
    // numerically dependent columns (relative pivot threshold 1e-10).
    std::optional<CVector> solve_least_squares(const CMatrix &a, const CVector &b);
}
