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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace domp
{
    using Complex = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RVector = Eigen::VectorXd;

    // Invalid argument, dimension mismatch or out-of-range coordinate
    class DomainError : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // A least-squares subproblem lost full column rank
    class SingularityError : public std::runtime_error
    {
    public:
        SingularityError(const std::string &what, int iteration)
            : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

        int iteration() const noexcept { return iteration_; }

    private:
        int iteration_;
    };

    // Numerically degenerate input to an interpolation or inversion step
    class DegenerateInputError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // The off-grid scenario generator could not satisfy its constraints
    class ScenarioError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline constexpr double pi = 3.14159265358979323846;
}
