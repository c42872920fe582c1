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

#include <span>
#include <vector>

#include "domp/types.hpp"

namespace domp
{
    // Uniform linear arrays at both ends of the link. Grids are square
    // (G_BS = M, G_UE = N); oversampled dictionaries are not supported.
    struct UlaConfig
    {
        int num_bs_antennas = 0;             // M
        int num_ue_antennas = 0;             // N
        int grid_bs = 0;                     // G_BS, must equal M
        int grid_ue = 0;                     // G_UE, must equal N
        double element_spacing_wavelengths = 0.5;

        UlaConfig() = default;
        UlaConfig(int m, int n, double spacing = 0.5)
            : num_bs_antennas(m), num_ue_antennas(n), grid_bs(m), grid_ue(n), element_spacing_wavelengths(spacing) {}

        int M() const noexcept { return num_bs_antennas; }
        int N() const noexcept { return num_ue_antennas; }

        // Throws DomainError if any invariant is violated
        void validate() const;

        friend bool operator==(const UlaConfig &, const UlaConfig &) = default;
    };

    struct MultipathComponent
    {
        Complex gain{1.0, 0.0};
        double aod = 0.0; // phi, radians in [-pi/2, pi/2]
        double aoa = 0.0; // theta, radians in [-pi/2, pi/2]
    };

    struct PhysicalChannel
    {
        std::vector<MultipathComponent> paths;
        CMatrix matrix; // N x M
    };

    // N x M matrix in the virtual (DFT) domain. Row index is the UE cell n',
    // column index the BS cell m'. Accessors are 1-based.
    struct BeamspaceMatrix
    {
        CMatrix values;

        int num_bs_cells() const noexcept { return static_cast<int>(values.cols()); }
        int num_ue_cells() const noexcept { return static_cast<int>(values.rows()); }

        Complex at(int m, int n) const { return values(n - 1, m - 1); }
        Complex &at(int m, int n) { return values(n - 1, m - 1); }
    };

    // Continuous location of a Dirichlet peak in the periodic virtual domain.
    // Coordinates live in [1, M+1) x [1, N+1).
    struct VirtualPeak
    {
        double m_star = 1.0;
        double n_star = 1.0;
        Complex strength{0.0, 0.0};
    };

    // ----- Array responses and the physical channel --------------------------

    CVector array_response_bs(const UlaConfig &config, double phi);
    CVector array_response_ue(const UlaConfig &config, double theta);

    PhysicalChannel build_channel(const UlaConfig &config, std::span<const MultipathComponent> paths);

    // ----- DFT dictionaries and the beamspace transform ----------------------

    // Unitary K x K dictionary whose column k' is the array response at the
    // grid angle with sin(phi) = 2(k'-1)/K - 1.
    CMatrix dft_dictionary(int size);

    BeamspaceMatrix to_beamspace(const PhysicalChannel &channel, const UlaConfig &config);
    BeamspaceMatrix to_beamspace(const CMatrix &channel_matrix, const UlaConfig &config);
    CMatrix from_beamspace(const BeamspaceMatrix &beamspace, const UlaConfig &config);

    // ----- Dirichlet kernel ----------------------------------------------------

    // sin(pi x K) / (K sin(pi x)), equal to 1 at x = 0. Integer x is handled by
    // the L'Hopital limit so the value stays exact near the kernel peak.
    double dirichlet_ratio(double x, int size);

    // (1/MN) (sin(pi varphi M) / sin(pi varphi)) (sin(pi vartheta N) / sin(pi vartheta))
    double dirichlet_kernel(double varphi, double vartheta, int m, int n);

    // Reduce a periodic virtual coordinate into [1, size+1)
    double wrap_coordinate(double x, int size);

    // Signed distance from `from` to `to` on the circle of circumference `size`, in (-size/2, size/2]
    double circular_difference(double to, double from, int size);

    // Peak coordinate of a path, wrapped into [1, K+1).
    //
    // With spacing d (in wavelengths) the beamspace entry at cell k' carries
    // the kernel argument
    //   (k'-1)/K - d sin(angle) - 1/2 = (k' - x*) / K,
    // so the Dirichlet peak sits at x* = 1 + K (1/2 + d sin(angle)).
    // For d = 1/2 this is x* = 1 + K (1 + sin(angle)) / 2.
    double peak_coordinate(double angle, int size, double spacing = 0.5);

    // Inverse of peak_coordinate on the sine axis. Throws DomainError when the
    // coordinate has no physical angle (possible only for d < 1/2).
    double sine_from_coordinate(double x, int size, double spacing = 0.5);

    VirtualPeak peak_from_path(const MultipathComponent &path, const UlaConfig &config);

    // Continuous (DTFT) beamspace response of the channel at a fractional cell
    Complex dtft_spectrum(std::span<const MultipathComponent> paths, const UlaConfig &config, double m_star, double n_star);

    // Rank-one factors of a unit-strength Dirichlet atom: atom = strength * ue * bs^T.
    //   ue[n] = (1/N) sum_i exp(-j 2 pi i (n - n*) / N)
    //   bs[m] = (1/M) sum_i exp(+j 2 pi i (m - m*) / M)
    // Peak coordinates may be any finite real; the factors are M- and N-periodic.
    struct DirichletFactors
    {
        CVector ue; // length N
        CVector bs; // length M
    };

    DirichletFactors dirichlet_factors(double m_star, double n_star, const UlaConfig &config);

    // Value of the unit-strength atom centred at (m*, n*) evaluated at cell (m, n)
    Complex dirichlet_atom_value(double m_star, double n_star, int m, int n, const UlaConfig &config);

    // N x M beamspace image of one path described by its Dirichlet peak
    BeamspaceMatrix dirichlet_atom(const VirtualPeak &peak, const UlaConfig &config);
}
