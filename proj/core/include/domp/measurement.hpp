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
#include <memory>

#include "domp/channel_model.hpp"

namespace domp
{
    struct Beamformers
    {
        CMatrix precoder; // F, M x M_t
        CMatrix combiner; // W, N x N_t
    };

    // Analog phase-shifter beamformers: unit-modulus entries with uniform
    // random phase, scaled so every column has unit norm.
    Beamformers random_beamformers(const UlaConfig &config, int num_precoders, int num_combiners, std::uint64_t seed);

    // Psi = conj(A_BS) (x) A_UE, MN x MN
    CMatrix dictionary_matrix(const UlaConfig &config);

    // Phi = F^T (x) W^H, (M_t N_t) x (MN)
    CMatrix beamforming_effect(const CMatrix &precoder, const CMatrix &combiner);

    // A = Phi Psi. Evaluated through the mixed-product rule
    // (F^T conj(A_BS)) (x) (W^H A_UE), which is the same matrix.
    CMatrix sensing_matrix(const CMatrix &precoder, const CMatrix &combiner, const UlaConfig &config);

    // Everything an estimator needs to map beamspace hypotheses to measurements.
    struct SensingSetup
    {
        UlaConfig config;
        CMatrix precoder;                          // F
        CMatrix combiner;                          // W
        std::shared_ptr<const CMatrix> dictionary; // Psi, shared between setups with the same config
        CMatrix beamforming_effect;                // Phi
        CMatrix sensing;                           // A = Phi Psi
        CMatrix combined_bs;                       // F^T conj(A_BS), M_t x M
        CMatrix combined_ue;                       // W^H A_UE,       N_t x N

        int num_precoders() const noexcept { return static_cast<int>(precoder.cols()); }
        int num_combiners() const noexcept { return static_cast<int>(combiner.cols()); }
        int num_measurements() const noexcept { return static_cast<int>(sensing.rows()); }

        // A vec(X) for a beamspace matrix X (column-major vec)
        CVector apply(const BeamspaceMatrix &beamspace) const;

        // A vec(ue bs^T) in O(M M_t + N N_t + M_t N_t) via the Kronecker structure
        CVector image(const DirichletFactors &factors) const;
    };

    SensingSetup make_sensing_setup(const UlaConfig &config, CMatrix precoder, CMatrix combiner);

    // F = I_M, W = I_N; then A = Psi and y = vec(H_V) without noise
    SensingSetup full_sampling_setup(const UlaConfig &config);

    struct Observation
    {
        CVector y;
        double noise_variance = 0.0;
        double snr_db = 0.0;
    };

    // y = A vec(H_V) + vec(W^H [n_1 ... n_{M_t}]) with n_i ~ CN(0, sigma^2 I_N),
    // sigma^2 = ||A vec(H_V)||^2 / (len(y) 10^(snr/10)). An SNR of +inf gives a
    // noiseless observation.
    Observation measure(const PhysicalChannel &channel, const SensingSetup &setup, double snr_db, std::uint64_t seed);
}
