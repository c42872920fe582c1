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

#include "domp/local_search.hpp"

#include <cmath>

#include "domp/types.hpp"

namespace domp
{
    LineMinimum golden_section_minimize(const std::function<double(double)> &f, double lower, double upper, int iterations)
    {
        if (!(lower <= upper))
            throw DomainError("golden-section bracket must satisfy lower <= upper");

        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

        LineMinimum best{lower, f(lower)};
        auto consider = [&best](double x, double v) {
            if (v < best.value)
                best = {x, v};
        };
        consider(upper, f(upper));

        double a = lower, b = upper;
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = f(c), fd = f(d);
        consider(c, fc);
        consider(d, fd);

        for (int i = 0; i < iterations && b - a > 0.0; ++i)
        {
            if (fc < fd)
            {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
                consider(c, fc);
            }
            else
            {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
                consider(d, fd);
            }
        }
        return best;
    }
}
