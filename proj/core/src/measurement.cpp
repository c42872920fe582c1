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

#include "domp/measurement.hpp"

#include <cmath>

#include "domp/linalg.hpp"
#include "domp/random.hpp"

namespace domp
{
    namespace
    {
        CMatrix random_phase_matrix(int rows, int cols, Rng &rng)
        {
            std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
            const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
            CMatrix out(rows, cols);
            for (int c = 0; c < cols; ++c)
                for (int r = 0; r < rows; ++r)
                    out(r, c) = std::polar(scale, phase(rng));
            return out;
        }

        void check_beamformers(const CMatrix &precoder, const CMatrix &combiner, const UlaConfig &config)
        {
            config.validate();
            if (precoder.rows() != config.M() || precoder.cols() < 1)
                throw DomainError("precoder must be M x M_t with M_t >= 1");
            if (combiner.rows() != config.N() || combiner.cols() < 1)
                throw DomainError("combiner must be N x N_t with N_t >= 1");
        }
    }

    Beamformers random_beamformers(const UlaConfig &config, int num_precoders, int num_combiners, std::uint64_t seed)
    {
        config.validate();
        if (num_precoders < 1 || num_combiners < 1)
            throw DomainError("beamformer counts must be positive");
        Rng rng(seed);
        Beamformers b;
        b.precoder = random_phase_matrix(config.M(), num_precoders, rng);
        b.combiner = random_phase_matrix(config.N(), num_combiners, rng);
        return b;
    }

    CMatrix dictionary_matrix(const UlaConfig &config)
    {
        config.validate();
        return kronecker(dft_dictionary(config.grid_bs).conjugate(), dft_dictionary(config.grid_ue));
    }

    CMatrix beamforming_effect(const CMatrix &precoder, const CMatrix &combiner)
    {
        return kronecker(precoder.transpose(), combiner.adjoint());
    }

    CMatrix sensing_matrix(const CMatrix &precoder, const CMatrix &combiner, const UlaConfig &config)
    {
        check_beamformers(precoder, combiner, config);
        const CMatrix combined_bs = precoder.transpose() * dft_dictionary(config.grid_bs).conjugate();
        const CMatrix combined_ue = combiner.adjoint() * dft_dictionary(config.grid_ue);
        return kronecker(combined_bs, combined_ue);
    }

    CVector SensingSetup::apply(const BeamspaceMatrix &beamspace) const
    {
        if (beamspace.num_ue_cells() != config.N() || beamspace.num_bs_cells() != config.M())
            throw DomainError("beamspace matrix does not match the sensing setup");
        return sensing * beamspace.values.reshaped();
    }

    CVector SensingSetup::image(const DirichletFactors &factors) const
    {
        // vec(p q^T) = q (x) p with p = W^H A_UE ue, q = F^T conj(A_BS) bs
        const CVector p = combined_ue * factors.ue;
        const CVector q = combined_bs * factors.bs;
        CVector out(p.size() * q.size());
        for (Eigen::Index k = 0; k < q.size(); ++k)
            out.segment(k * p.size(), p.size()) = q(k) * p;
        return out;
    }

    SensingSetup make_sensing_setup(const UlaConfig &config, CMatrix precoder, CMatrix combiner)
    {
        check_beamformers(precoder, combiner, config);
        SensingSetup s;
        s.config = config;
        s.precoder = std::move(precoder);
        s.combiner = std::move(combiner);
        s.dictionary = std::make_shared<const CMatrix>(dictionary_matrix(config));
        s.beamforming_effect = beamforming_effect(s.precoder, s.combiner);
        s.combined_bs = s.precoder.transpose() * dft_dictionary(config.grid_bs).conjugate();
        s.combined_ue = s.combiner.adjoint() * dft_dictionary(config.grid_ue);
        s.sensing = kronecker(s.combined_bs, s.combined_ue);
        return s;
    }

    SensingSetup full_sampling_setup(const UlaConfig &config)
    {
        config.validate();
        return make_sensing_setup(config, CMatrix::Identity(config.M(), config.M()),
                                  CMatrix::Identity(config.N(), config.N()));
    }

    Observation measure(const PhysicalChannel &channel, const SensingSetup &setup, double snr_db, std::uint64_t seed)
    {
        if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0.0))
            throw DomainError("SNR must be a number greater than -inf dB");
        if (channel.matrix.rows() != setup.config.N() || channel.matrix.cols() != setup.config.M())
            throw DomainError("channel dimensions do not match the sensing setup");

        Observation obs;
        obs.snr_db = snr_db;
        // A vec(H_V) = vec(W^H H F)
        const CMatrix received = setup.combiner.adjoint() * channel.matrix * setup.precoder;
        obs.y = received.reshaped();

        if (std::isinf(snr_db))
            return obs;

        const double signal_power = obs.y.squaredNorm() / static_cast<double>(obs.y.size());
        obs.noise_variance = signal_power / std::pow(10.0, snr_db / 10.0);

        Rng rng(seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(obs.noise_variance / 2.0));
        CMatrix antenna_noise(setup.config.N(), setup.num_precoders());
        for (Eigen::Index c = 0; c < antenna_noise.cols(); ++c)
            for (Eigen::Index r = 0; r < antenna_noise.rows(); ++r)
            {
                const double re = gauss(rng);
                const double im = gauss(rng);
                antenna_noise(r, c) = Complex(re, im);
            }
        const CMatrix combined_noise = setup.combiner.adjoint() * antenna_noise;
        obs.y += combined_noise.reshaped();
        return obs;
    }
}
