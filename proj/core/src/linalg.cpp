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

#include "domp/linalg.hpp"

namespace domp
{
    CMatrix kronecker(const CMatrix &a, const CMatrix &b)
    {
        CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    }

    std::optional<CVector> solve_least_squares(const CMatrix &a, const CVector &b)
    {
        if (a.cols() == 0 || a.rows() < a.cols())
            return std::nullopt;
        Eigen::ColPivHouseholderQR<CMatrix> qr(a);
        qr.setThreshold(1e-10);
        if (qr.rank() < a.cols())
            return std::nullopt;
        return CVector(qr.solve(b));
    }
}
