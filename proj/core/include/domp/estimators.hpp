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
#include <string_view>
#include <vector>

#include "domp/channel_model.hpp"
#include "domp/measurement.hpp"

namespace domp
{
    enum class EstimatorKind
    {
        omp,
        domp_mlb,
        domp_mslb,
        domp_lo,
    };

    inline constexpr EstimatorKind all_estimators[] = {EstimatorKind::omp, EstimatorKind::domp_mlb,
                                                       EstimatorKind::domp_mslb, EstimatorKind::domp_lo};

    // "omp", "domp-mlb", "domp-mslb", "domp-lo"
    std::string_view to_string(EstimatorKind kind) noexcept;
    std::optional<EstimatorKind> parse_estimator(std::string_view name) noexcept;

    struct EstimatorConfig
    {
        double residual_tolerance = 1e-9; // epsilon: stop once ||y_res|| <= epsilon
        int max_paths = 3;                // L_max
        double lo_grid_step = 1e-2;       // coarse grid step of the DOMP-LO location search, in cells
        int lo_refine_iters = 40;         // golden-section reductions per coordinate line search
        int omp_iteration_factor = 4;     // baseline OMP may select up to max_paths * factor atoms

        // Cyclic re-estimation passes over all recovered paths after each new
        // path is added: each path is refit against y minus the other atoms.
        // Passes stop early once the residual improves by less than
        // refit_tolerance * ||y||. 0 gives the purely greedy recursion.
        int refit_sweeps = 12;
        double refit_tolerance = 1e-12;

        // Re-estimate all path strengths jointly by least squares against y
        // after the fit and after every refit pass.
        bool joint_strengths = true;

        void validate() const;
    };

    // Noise-floor stopping rule: 0.9 * 10^(-snr/20) * ||y||. For an infinite
    // SNR it returns 1e-9 * ||y||.
    double noise_floor_tolerance(const CVector &y, double snr_db);

    struct GridCell
    {
        int m = 1;
        int n = 1;

        friend bool operator==(const GridCell &, const GridCell &) = default;
    };

    struct MatchResult
    {
        int j_star = 1; // 1-based column of A
        int m_prime = 1;
        int n_prime = 1;
    };

    // LS estimates at the DFT peak cell and its four periodic neighbours
    struct NeighborhoodEstimate
    {
        Complex center;
        Complex m_plus;  // (m'+1, n')
        Complex m_minus; // (m'-1, n')
        Complex n_plus;  // (m', n'+1)
        Complex n_minus; // (m', n'-1)
    };

    struct EstimateResult
    {
        std::vector<VirtualPeak> paths;
        std::vector<GridCell> cells; // DFT peak cell each path was seeded from
        BeamspaceMatrix beamspace;   // H_V estimate, N x M
        CMatrix channel;             // A_UE H_V A_BS^H, N x M
        std::vector<double> residual_history;
        int iterations = 0;
        bool stopped_on_residual_increase = false;

        double final_residual() const;

        // Fractional offset (m* - m', n* - n') of every path from its seed cell
        std::vector<std::pair<double, double>> offsets(const UlaConfig &config) const;
    };

    // ----- building blocks ----------------------------------------------------

    // j* = argmax_j |A(:,j)^H y_res| / ||A(:,j)||, lowest index on ties. With the N x M
    // beamspace vectorised column-major, j* maps to m' = floor((j*-1)/N)+1,
    // n' = ((j*-1) mod N)+1.
    MatchResult match_step(const CMatrix &sensing, const CVector &residual, const UlaConfig &config);

    // 1-based column index of cell (m, n) after periodic reduction
    int column_index(int m, int n, const UlaConfig &config);

    NeighborhoodEstimate neighborhood_ls(const CMatrix &sensing, const CVector &residual, int m_prime, int n_prime,
                                         const UlaConfig &config);

    // Main-lobe offset from magnitude ratios, in [-1/2, 1/2]
    double mlb_offset(Complex center, Complex plus, Complex minus);

    // Bias-corrected three-sample offset
    //   (tan(pi/K) / (pi/K)) Re((minus - plus) / (2 center - minus - plus)),
    // clamped to [-1/2, 1/2]. Throws DegenerateInputError when the denominator vanishes.
    double mslb_offset(Complex center, Complex plus, Complex minus, int size);

    // Continuous peak strength: the centre LS estimate divided by the unit atom
    // centred at (m*, n*) evaluated at (m', n').
    Complex peak_strength(Complex center, int m_prime, int n_prime, double m_star, double n_star,
                          const UlaConfig &config);

    struct LocalizedFit
    {
        VirtualPeak peak;
        double objective = 0.0; // ||r - A vec(atom)||^2 at the optimum
    };

    // min over (alpha, m*, n*) in [m'-1, m'+1] x [n'-1, n'+1] of ||r - A vec(atom)||^2.
    // alpha is the closed-form LS coefficient for each location; the location is
    // found by a coarse grid followed by coordinate-wise golden-section refinement.
    LocalizedFit localized_fit(const SensingSetup &setup, const CVector &residual, int m_prime, int n_prime,
                               const EstimatorConfig &config);

    // ----- estimators -----------------------------------------------------------

    EstimateResult omp_standard(const CVector &y, const SensingSetup &setup, const EstimatorConfig &config);
    EstimateResult domp_mlb(const CVector &y, const SensingSetup &setup, const EstimatorConfig &config);
    EstimateResult domp_mslb(const CVector &y, const SensingSetup &setup, const EstimatorConfig &config);
    EstimateResult domp_lo(const CVector &y, const SensingSetup &setup, const EstimatorConfig &config);

    EstimateResult run_estimator(EstimatorKind kind, const CVector &y, const SensingSetup &setup,
                                 const EstimatorConfig &config);
}
