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

#include "domp/channel_model.hpp"

#include <algorithm>
#include <cmath>

namespace domp
{
    namespace
    {
        constexpr double angle_slack = 1e-12;
        constexpr double singular_threshold = 1e-9;

        void check_angle(double angle, const char *name)
        {
            if (!std::isfinite(angle) || std::abs(angle) > pi / 2.0 + angle_slack)
                throw DomainError(std::string(name) + " must lie in [-pi/2, pi/2]");
        }

        CVector ula_response(int size, double spacing, double angle)
        {
            const double scale = 1.0 / std::sqrt(static_cast<double>(size));
            const double step = 2.0 * pi * spacing * std::sin(angle);
            CVector a(size);
            for (int k = 0; k < size; ++k)
                a(k) = std::polar(scale, step * k);
            return a;
        }

        // (1/K) sum_{i<K} exp(j 2 pi i x / K)
        Complex dirichlet_sum(double x, int size)
        {
            const double k = static_cast<double>(size);
            return dirichlet_ratio(x / k, size) * std::polar(1.0, pi * x * (k - 1.0) / k);
        }

        void check_peak(double coordinate, int size, const char *name)
        {
            if (!std::isfinite(coordinate) || coordinate < 1.0 || coordinate >= size + 1.0)
                throw DomainError(std::string(name) + " must lie in [1, " + std::to_string(size + 1) + ")");
        }
    }

    void UlaConfig::validate() const
    {
        if (num_bs_antennas < 1 || num_ue_antennas < 1)
            throw DomainError("antenna counts must be positive");
        if (grid_bs != num_bs_antennas || grid_ue != num_ue_antennas)
            throw DomainError("grid sizes must equal the antenna counts (square DFT dictionaries)");
        if (!(element_spacing_wavelengths > 0.0) || !std::isfinite(element_spacing_wavelengths))
            throw DomainError("element spacing must be positive");
    }

    CVector array_response_bs(const UlaConfig &config, double phi)
    {
        config.validate();
        check_angle(phi, "AoD");
        return ula_response(config.M(), config.element_spacing_wavelengths, phi);
    }

    CVector array_response_ue(const UlaConfig &config, double theta)
    {
        config.validate();
        check_angle(theta, "AoA");
        return ula_response(config.N(), config.element_spacing_wavelengths, theta);
    }

    PhysicalChannel build_channel(const UlaConfig &config, std::span<const MultipathComponent> paths)
    {
        config.validate();
        if (paths.empty())
            throw DomainError("a channel needs at least one multipath component");

        PhysicalChannel channel;
        channel.paths.assign(paths.begin(), paths.end());
        channel.matrix = CMatrix::Zero(config.N(), config.M());
        for (const auto &path : paths)
        {
            const CVector a_ue = array_response_ue(config, path.aoa);
            const CVector a_bs = array_response_bs(config, path.aod);
            channel.matrix.noalias() += path.gain * a_ue * a_bs.adjoint();
        }
        return channel;
    }

    CMatrix dft_dictionary(int size)
    {
        if (size < 1)
            throw DomainError("dictionary size must be positive");

        // exp(j 2 pi k (k'/K - 1/2)) = exp(j 2 pi (k k' mod K) / K) * (-1)^k, 0-based
        const double scale = 1.0 / std::sqrt(static_cast<double>(size));
        CMatrix dictionary(size, size);
        for (int col = 0; col < size; ++col)
            for (int row = 0; row < size; ++row)
            {
                const long long residue = (static_cast<long long>(row) * col) % size;
                const double sign = (row % 2 == 0) ? 1.0 : -1.0;
                dictionary(row, col) = std::polar(sign * scale, 2.0 * pi * static_cast<double>(residue) / size);
            }
        return dictionary;
    }

    BeamspaceMatrix to_beamspace(const CMatrix &channel_matrix, const UlaConfig &config)
    {
        config.validate();
        if (channel_matrix.rows() != config.N() || channel_matrix.cols() != config.M())
            throw DomainError("channel matrix must be N x M");
        const CMatrix a_ue = dft_dictionary(config.grid_ue);
        const CMatrix a_bs = dft_dictionary(config.grid_bs);
        return BeamspaceMatrix{a_ue.adjoint() * channel_matrix * a_bs};
    }

    BeamspaceMatrix to_beamspace(const PhysicalChannel &channel, const UlaConfig &config)
    {
        return to_beamspace(channel.matrix, config);
    }

    CMatrix from_beamspace(const BeamspaceMatrix &beamspace, const UlaConfig &config)
    {
        config.validate();
        if (beamspace.num_ue_cells() != config.N() || beamspace.num_bs_cells() != config.M())
            throw DomainError("beamspace matrix must be N x M");
        const CMatrix a_ue = dft_dictionary(config.grid_ue);
        const CMatrix a_bs = dft_dictionary(config.grid_bs);
        return a_ue * beamspace.values * a_bs.adjoint();
    }

    double dirichlet_ratio(double x, int size)
    {
        const double k = static_cast<double>(size);
        const double denominator = std::sin(pi * x);
        if (std::abs(denominator) < singular_threshold)
            return std::cos(pi * x * k) / std::cos(pi * x);
        return std::sin(pi * x * k) / (k * denominator);
    }

    double dirichlet_kernel(double varphi, double vartheta, int m, int n)
    {
        return dirichlet_ratio(varphi, m) * dirichlet_ratio(vartheta, n);
    }

    double wrap_coordinate(double x, int size)
    {
        double wrapped = std::fmod(x - 1.0, static_cast<double>(size));
        if (wrapped < 0.0)
            wrapped += size;
        // fmod of a tiny negative number can round up to exactly `size`
        if (wrapped >= size)
            wrapped -= size;
        return wrapped + 1.0;
    }

    double circular_difference(double to, double from, int size)
    {
        double d = std::fmod(to - from, static_cast<double>(size));
        if (d > size / 2.0)
            d -= size;
        else if (d <= -size / 2.0)
            d += size;
        return d;
    }

    double peak_coordinate(double angle, int size, double spacing)
    {
        check_angle(angle, "angle");
        return wrap_coordinate(1.0 + size * (0.5 + spacing * std::sin(angle)), size);
    }

    double sine_from_coordinate(double x, int size, double spacing)
    {
        double s = ((wrap_coordinate(x, size) - 1.0) / size - 0.5) / spacing;
        if (s < -1.0 - 1e-12 || s > 1.0 + 1e-12)
            throw DomainError("virtual coordinate has no physical angle at this element spacing");
        return std::clamp(s, -1.0, 1.0);
    }

    VirtualPeak peak_from_path(const MultipathComponent &path, const UlaConfig &config)
    {
        config.validate();
        return VirtualPeak{peak_coordinate(path.aod, config.M(), config.element_spacing_wavelengths),
                           peak_coordinate(path.aoa, config.N(), config.element_spacing_wavelengths), path.gain};
    }

    Complex dtft_spectrum(std::span<const MultipathComponent> paths, const UlaConfig &config, double m_star, double n_star)
    {
        config.validate();
        check_peak(m_star, config.M(), "m*");
        check_peak(n_star, config.N(), "n*");

        const double m = config.M();
        const double n = config.N();
        const double d = config.element_spacing_wavelengths;
        Complex value{0.0, 0.0};
        for (const auto &path : paths)
        {
            check_angle(path.aod, "AoD");
            check_angle(path.aoa, "AoA");
            const double varphi = (m_star - 1.0) / m - d * std::sin(path.aod) - 0.5;
            const double vartheta = (n_star - 1.0) / n - d * std::sin(path.aoa) - 0.5;
            const Complex phase = std::polar(1.0, -pi * vartheta * (n - 1.0)) / std::polar(1.0, -pi * varphi * (m - 1.0));
            value += path.gain * dirichlet_kernel(varphi, vartheta, config.M(), config.N()) * phase;
        }
        return value;
    }

    DirichletFactors dirichlet_factors(double m_star, double n_star, const UlaConfig &config)
    {
        if (!std::isfinite(m_star) || !std::isfinite(n_star))
            throw DomainError("peak coordinates must be finite");
        DirichletFactors f{CVector(config.N()), CVector(config.M())};
        for (int n = 1; n <= config.N(); ++n)
            f.ue(n - 1) = dirichlet_sum(n_star - n, config.N());
        for (int m = 1; m <= config.M(); ++m)
            f.bs(m - 1) = dirichlet_sum(m - m_star, config.M());
        return f;
    }

    Complex dirichlet_atom_value(double m_star, double n_star, int m, int n, const UlaConfig &config)
    {
        return dirichlet_sum(n_star - n, config.N()) * dirichlet_sum(m - m_star, config.M());
    }

    BeamspaceMatrix dirichlet_atom(const VirtualPeak &peak, const UlaConfig &config)
    {
        config.validate();
        check_peak(peak.m_star, config.M(), "m*");
        check_peak(peak.n_star, config.N(), "n*");
        const DirichletFactors f = dirichlet_factors(peak.m_star, peak.n_star, config);
        return BeamspaceMatrix{peak.strength * f.ue * f.bs.transpose()};
    }
}
