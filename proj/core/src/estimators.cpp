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

#include "domp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "domp/linalg.hpp"
#include "domp/local_search.hpp"

namespace domp
{
    namespace
    {
        constexpr double strength_floor = 1e-9;

        int wrap_index(int k, int size)
        {
            const int r = (k - 1) % size;
            return (r < 0 ? r + size : r) + 1;
        }

        double safe_ratio(double num, double den)
        {
            if (den == 0.0)
                return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            return num / den;
        }

        void check_inputs(const CVector &y, const SensingSetup &setup, const EstimatorConfig &config)
        {
            config.validate();
            setup.config.validate();
            if (y.size() != setup.sensing.rows())
                throw DomainError("observation length does not match the sensing matrix");
            if (setup.sensing.cols() != static_cast<Eigen::Index>(setup.config.M()) * setup.config.N())
                throw DomainError("sensing matrix must have M*N columns");
        }

        EstimateResult finish(EstimateResult result, const SensingSetup &setup)
        {
            result.iterations = static_cast<int>(result.residual_history.size());
            result.channel = from_beamspace(result.beamspace, setup.config);
            return result;
        }

        // Per-path estimator used by the Dirichlet variants: given the residual
        // attributed to one path and its DFT peak cell, return the continuous peak.
        using PathFit = std::function<VirtualPeak(const CVector &residual, const GridCell &cell)>;

        // Shared greedy loop of DOMP-MLb, DOMP-MSLb and DOMP-LO: match, fit one
        // Dirichlet atom, re-estimate the recovered paths against y, subtract
        // their images, repeat.
        EstimateResult dirichlet_pursuit(const CVector &y, const SensingSetup &setup, const EstimatorConfig &config,
                                         const PathFit &fit)
        {
            check_inputs(y, setup, config);
            const UlaConfig &ula = setup.config;
            if (ula.M() < 3 || ula.N() < 3)
                throw DomainError("Dirichlet estimators need at least 3 cells per dimension");

            auto image_of = [&](const VirtualPeak &p) -> CVector {
                return p.strength * setup.image(dirichlet_factors(p.m_star, p.n_star, ula));
            };

            EstimateResult result;
            std::vector<CVector> images;
            CVector residual = y;
            double residual_norm = y.norm();

            auto project_strengths = [&](std::vector<VirtualPeak> &paths, std::vector<CVector> &imgs) {
                CMatrix basis(y.size(), static_cast<Eigen::Index>(paths.size()));
                for (std::size_t k = 0; k < paths.size(); ++k)
                    basis.col(static_cast<Eigen::Index>(k)) = setup.image(dirichlet_factors(paths[k].m_star, paths[k].n_star, ula));
                const auto coeffs = solve_least_squares(basis, y);
                if (!coeffs)
                    return;
                for (std::size_t k = 0; k < paths.size(); ++k)
                {
                    paths[k].strength = (*coeffs)(static_cast<Eigen::Index>(k));
                    imgs[k] = paths[k].strength * basis.col(static_cast<Eigen::Index>(k));
                }
            };

            while (residual_norm > config.residual_tolerance && static_cast<int>(result.paths.size()) < config.max_paths)
            {
                const int iteration = static_cast<int>(result.paths.size()) + 1;
                std::vector<VirtualPeak> paths = result.paths;
                std::vector<GridCell> cells = result.cells;
                std::vector<CVector> trial_images = images;
                try
                {
                    const MatchResult match = match_step(setup.sensing, residual, ula);
                    const GridCell cell{match.m_prime, match.n_prime};
                    paths.push_back(fit(residual, cell));
                    cells.push_back(cell);
                    trial_images.push_back(image_of(paths.back()));
                    if (config.joint_strengths)
                        project_strengths(paths, trial_images);

                    double sweep_norm = std::numeric_limits<double>::infinity();
                    for (int sweep = 0; sweep < config.refit_sweeps && paths.size() > 1; ++sweep)
                    {
                        for (std::size_t k = 0; k < paths.size(); ++k)
                        {
                            CVector own = y;
                            for (std::size_t i = 0; i < paths.size(); ++i)
                                if (i != k)
                                    own -= trial_images[i];
                            if (own.squaredNorm() == 0.0)
                                continue;
                            paths[k] = fit(own, cells[k]);
                            trial_images[k] = image_of(paths[k]);
                        }
                        if (config.joint_strengths)
                            project_strengths(paths, trial_images);

                        CVector left = y;
                        for (const auto &img : trial_images)
                            left -= img;
                        const double left_norm = left.norm();
                        if (!(left_norm < sweep_norm - config.refit_tolerance * y.norm()))
                            break;
                        sweep_norm = left_norm;
                    }
                }
                catch (const SingularityError &e)
                {
                    throw SingularityError(e.what(), iteration);
                }

                CVector next = y;
                for (const auto &img : trial_images)
                    next -= img;
                const double next_norm = next.norm();
                if (!(next_norm < residual_norm))
                {
                    result.stopped_on_residual_increase = true;
                    break;
                }

                result.paths = std::move(paths);
                result.cells = std::move(cells);
                images = std::move(trial_images);
                residual = std::move(next);
                residual_norm = next_norm;
                result.residual_history.push_back(residual_norm);
            }

            result.beamspace.values = CMatrix::Zero(ula.N(), ula.M());
            for (const auto &p : result.paths)
            {
                const DirichletFactors f = dirichlet_factors(p.m_star, p.n_star, ula);
                result.beamspace.values.noalias() += p.strength * f.ue * f.bs.transpose();
            }
            return finish(std::move(result), setup);
        }

        enum class LobeRule
        {
            main,
            main_and_side,
        };

        PathFit lobe_fit(const SensingSetup &setup, LobeRule rule)
        {
            return [&setup, rule](const CVector &residual, const GridCell &cell) {
                const UlaConfig &ula = setup.config;
                const NeighborhoodEstimate est = neighborhood_ls(setup.sensing, residual, cell.m, cell.n, ula);

                double dm = 0.0, dn = 0.0;
                if (rule == LobeRule::main)
                {
                    dm = mlb_offset(est.center, est.m_plus, est.m_minus);
                    dn = mlb_offset(est.center, est.n_plus, est.n_minus);
                }
                else
                {
                    // A vanishing three-point denominator falls back to the main-lobe rule
                    try
                    {
                        dm = mslb_offset(est.center, est.m_plus, est.m_minus, ula.M());
                    }
                    catch (const DegenerateInputError &)
                    {
                        dm = mlb_offset(est.center, est.m_plus, est.m_minus);
                    }
                    try
                    {
                        dn = mslb_offset(est.center, est.n_plus, est.n_minus, ula.N());
                    }
                    catch (const DegenerateInputError &)
                    {
                        dn = mlb_offset(est.center, est.n_plus, est.n_minus);
                    }
                }

                const double m_star = cell.m + dm;
                const double n_star = cell.n + dn;
                const Complex alpha = peak_strength(est.center, cell.m, cell.n, m_star, n_star, ula);
                return VirtualPeak{wrap_coordinate(m_star, ula.M()), wrap_coordinate(n_star, ula.N()), alpha};
            };
        }
    }

    std::string_view to_string(EstimatorKind kind) noexcept
    {
        switch (kind)
        {
        case EstimatorKind::omp:
            return "omp";
        case EstimatorKind::domp_mlb:
            return "domp-mlb";
        case EstimatorKind::domp_mslb:
            return "domp-mslb";
        case EstimatorKind::domp_lo:
            return "domp-lo";
        }
        return "unknown";
    }

    std::optional<EstimatorKind> parse_estimator(std::string_view name) noexcept
    {
        for (EstimatorKind k : all_estimators)
            if (to_string(k) == name)
                return k;
        return std::nullopt;
    }

    void EstimatorConfig::validate() const
    {
        if (!(residual_tolerance > 0.0))
            throw DomainError("residual tolerance must be positive");
        if (max_paths < 1)
            throw DomainError("max_paths must be at least 1");
        if (!(lo_grid_step > 0.0) || lo_grid_step > 1.0)
            throw DomainError("lo_grid_step must lie in (0, 1]");
        if (lo_refine_iters < 1)
            throw DomainError("lo_refine_iters must be positive");
        if (omp_iteration_factor < 1)
            throw DomainError("omp_iteration_factor must be positive");
        if (refit_sweeps < 0)
            throw DomainError("refit_sweeps must be non-negative");
        if (!(refit_tolerance >= 0.0))
            throw DomainError("refit_tolerance must be non-negative");
    }

    double noise_floor_tolerance(const CVector &y, double snr_db)
    {
        if (std::isnan(snr_db))
            throw DomainError("SNR must be a number");
        const double norm = y.norm();
        if (std::isinf(snr_db) && snr_db > 0.0)
            return std::max(1e-9 * norm, std::numeric_limits<double>::min());
        return std::max(0.9 * std::pow(10.0, -snr_db / 20.0) * norm, std::numeric_limits<double>::min());
    }

    double EstimateResult::final_residual() const
    {
        return residual_history.empty() ? std::numeric_limits<double>::quiet_NaN() : residual_history.back();
    }

    std::vector<std::pair<double, double>> EstimateResult::offsets(const UlaConfig &config) const
    {
        std::vector<std::pair<double, double>> out;
        out.reserve(paths.size());
        for (std::size_t i = 0; i < paths.size(); ++i)
            out.emplace_back(circular_difference(paths[i].m_star, cells[i].m, config.M()),
                             circular_difference(paths[i].n_star, cells[i].n, config.N()));
        return out;
    }

    int column_index(int m, int n, const UlaConfig &config)
    {
        return (wrap_index(m, config.M()) - 1) * config.N() + wrap_index(n, config.N());
    }

    MatchResult match_step(const CMatrix &sensing, const CVector &residual, const UlaConfig &config)
    {
        if (sensing.cols() != static_cast<Eigen::Index>(config.M()) * config.N())
            throw DomainError("sensing matrix must have M*N columns");
        if (residual.size() != sensing.rows())
            throw DomainError("residual length does not match the sensing matrix");
        if (residual.squaredNorm() == 0.0)
            throw DomainError("match step needs a nonzero residual");

        // Correlations are normalised by the column norms, which vary widely
        // under random analog beamformers and would otherwise bias the pick.
        const RVector column_energy =
            sensing.colwise().squaredNorm().transpose().cwiseMax(std::numeric_limits<double>::min());
        const RVector correlation = (sensing.adjoint() * residual).cwiseAbs2().cwiseQuotient(column_energy);
        Eigen::Index best = 0;
        for (Eigen::Index j = 1; j < correlation.size(); ++j)
            if (correlation(j) > correlation(best))
                best = j;

        const int j_star = static_cast<int>(best) + 1;
        return MatchResult{j_star, static_cast<int>(best / config.N()) + 1, static_cast<int>(best % config.N()) + 1};
    }

    NeighborhoodEstimate neighborhood_ls(const CMatrix &sensing, const CVector &residual, int m_prime, int n_prime,
                                         const UlaConfig &config)
    {
        if (sensing.cols() != static_cast<Eigen::Index>(config.M()) * config.N())
            throw DomainError("sensing matrix must have M*N columns");
        if (residual.size() != sensing.rows())
            throw DomainError("residual length does not match the sensing matrix");

        const int columns[5] = {
            column_index(m_prime, n_prime, config),     column_index(m_prime + 1, n_prime, config),
            column_index(m_prime - 1, n_prime, config), column_index(m_prime, n_prime + 1, config),
            column_index(m_prime, n_prime - 1, config),
        };
        CMatrix sub(sensing.rows(), 5);
        for (int k = 0; k < 5; ++k)
            sub.col(k) = sensing.col(columns[k] - 1);

        const auto coeffs = solve_least_squares(sub, residual);
        if (!coeffs)
            throw SingularityError("neighbourhood least-squares matrix is rank deficient", 0);
        const CVector &c = *coeffs;
        return NeighborhoodEstimate{c(0), c(1), c(2), c(3), c(4)};
    }

    double mlb_offset(Complex center, Complex plus, Complex minus)
    {
        const double c = std::abs(center), p = std::abs(plus), m = std::abs(minus);
        if (c == 0.0 && p == 0.0 && m == 0.0)
            throw DegenerateInputError("main-lobe offset needs a nonzero estimate");
        double delta;
        if (p > m)
            delta = 0.5 * std::min(safe_ratio(c, p), safe_ratio(p, c));
        else
            delta = -0.5 * std::min(safe_ratio(c, m), safe_ratio(m, c));
        return std::clamp(delta, -0.5, 0.5);
    }

    double mslb_offset(Complex center, Complex plus, Complex minus, int size)
    {
        if (size < 3)
            throw DomainError("three-point offset needs at least 3 cells");
        const Complex denominator = 2.0 * center - minus - plus;
        if (!(std::abs(denominator) > 1e-12 * std::abs(center)))
            throw DegenerateInputError("three-point offset denominator vanishes");
        const double w = pi / size;
        const double delta = std::tan(w) / w * std::real((minus - plus) / denominator);
        return std::clamp(delta, -0.5, 0.5);
    }

    Complex peak_strength(Complex center, int m_prime, int n_prime, double m_star, double n_star,
                          const UlaConfig &config)
    {
        if (m_star == m_prime && n_star == n_prime)
            return center;
        const Complex value = dirichlet_atom_value(m_star, n_star, m_prime, n_prime, config);
        if (!(std::abs(value) >= strength_floor))
            throw DegenerateInputError("Dirichlet atom vanishes at the seed cell");
        return center / value;
    }

    LocalizedFit localized_fit(const SensingSetup &setup, const CVector &residual, int m_prime, int n_prime,
                               const EstimatorConfig &config)
    {
        config.validate();
        const UlaConfig &ula = setup.config;
        const int mt = setup.num_precoders();
        const int nt = setup.num_combiners();
        if (residual.size() != static_cast<Eigen::Index>(mt) * nt)
            throw DomainError("residual length does not match the sensing setup");

        // r = vec(R) with R of size N_t x M_t; for an atom with factors (ue, bs)
        // the image is q (x) p, p = W^H A_UE ue, q = F^T conj(A_BS) bs, and
        // <image, r> = p^H R conj(q).
        const Eigen::Map<const CMatrix> r_mat(residual.data(), nt, mt);
        const double r_energy = residual.squaredNorm();

        auto ue_image = [&](double n_star) {
            return CVector(setup.combined_ue * dirichlet_factors(1.0, n_star, ula).ue);
        };
        auto bs_image = [&](double m_star) {
            return CVector(setup.combined_bs * dirichlet_factors(m_star, 1.0, ula).bs);
        };

        struct Row
        {
            Eigen::RowVectorXcd projected; // p^H R
            double norm2;
        };
        struct Col
        {
            CVector q;
            double norm2;
        };
        auto make_row = [&](double n_star) {
            const CVector p = ue_image(n_star);
            return Row{p.adjoint() * r_mat, p.squaredNorm()};
        };
        auto make_col = [&](double m_star) {
            CVector q = bs_image(m_star);
            const double n2 = q.squaredNorm();
            return Col{std::move(q), n2};
        };
        // Energy captured by the best-scaled atom: |p^H R conj(q)|^2 / (|p|^2 |q|^2)
        auto captured = [](const Row &row, const Col &col) {
            const double denom = row.norm2 * col.norm2;
            if (!(denom > 0.0))
                return 0.0;
            const Complex inner = row.projected * col.q.conjugate();
            return std::norm(inner) / denom;
        };

        const double step = config.lo_grid_step;
        const int count = static_cast<int>(std::llround(2.0 / step)) + 1;
        const double m_lo = m_prime - 1.0, m_hi = m_prime + 1.0;
        const double n_lo = n_prime - 1.0, n_hi = n_prime + 1.0;
        auto grid_point = [&](double lo, double hi, int k) { return std::min(lo + k * step, hi); };

        std::vector<Row> rows;
        rows.reserve(count);
        for (int a = 0; a < count; ++a)
            rows.push_back(make_row(grid_point(n_lo, n_hi, a)));
        std::vector<Col> cols;
        cols.reserve(count);
        for (int b = 0; b < count; ++b)
            cols.push_back(make_col(grid_point(m_lo, m_hi, b)));

        double best_score = -1.0;
        double best_m = m_prime, best_n = n_prime;
        for (int b = 0; b < count; ++b)
            for (int a = 0; a < count; ++a)
            {
                const double s = captured(rows[a], cols[b]);
                if (s > best_score)
                {
                    best_score = s;
                    best_m = grid_point(m_lo, m_hi, b);
                    best_n = grid_point(n_lo, n_hi, a);
                }
            }

        // Coordinate-wise golden-section refinement inside one coarse step
        constexpr int max_cycles = 8;
        for (int cycle = 0; cycle < max_cycles; ++cycle)
        {
            const double prev_m = best_m, prev_n = best_n;

            const Row row = make_row(best_n);
            const LineMinimum along_m = golden_section_minimize(
                [&](double m) { return -captured(row, make_col(m)); }, std::max(m_lo, best_m - step),
                std::min(m_hi, best_m + step), config.lo_refine_iters);
            if (-along_m.value > best_score)
            {
                best_score = -along_m.value;
                best_m = along_m.x;
            }

            const Col col = make_col(best_m);
            const LineMinimum along_n = golden_section_minimize(
                [&](double n) { return -captured(make_row(n), col); }, std::max(n_lo, best_n - step),
                std::min(n_hi, best_n + step), config.lo_refine_iters);
            if (-along_n.value > best_score)
            {
                best_score = -along_n.value;
                best_n = along_n.x;
            }

            if (std::abs(best_m - prev_m) < 1e-12 && std::abs(best_n - prev_n) < 1e-12)
                break;
        }

        // The captured energy is flat to second order at its maximum, so the
        // line searches stop resolving the location near sqrt(machine eps).
        // Newton steps on the central-difference derivative, which is linear
        // in the location error, polish the last digits.
        constexpr double h = 1e-4;
        auto newton = [&](auto &&score, double x, double lo, double hi) {
            const double f0 = score(x), fp = score(x + h), fm = score(x - h);
            const double curvature = (fp - 2.0 * f0 + fm) / (h * h);
            if (!(curvature < 0.0))
                return x;
            const double delta = -(fp - fm) / (2.0 * h) / curvature;
            return std::abs(delta) < h && x + delta >= lo && x + delta <= hi ? x + delta : x;
        };
        for (int cycle = 0; cycle < 3; ++cycle)
        {
            const Row row = make_row(best_n);
            best_m = newton([&](double m) { return captured(row, make_col(m)); }, best_m, m_lo, m_hi);
            const Col col = make_col(best_m);
            best_n = newton([&](double n) { return captured(make_row(n), col); }, best_n, n_lo, n_hi);
        }
        best_score = captured(make_row(best_n), make_col(best_m));

        const Row row = make_row(best_n);
        const Col col = make_col(best_m);
        const double denom = row.norm2 * col.norm2;
        const Complex alpha = denom > 0.0 ? Complex(row.projected * col.q.conjugate()) / denom : Complex(0.0, 0.0);

        LocalizedFit fit;
        fit.peak = VirtualPeak{wrap_coordinate(best_m, ula.M()), wrap_coordinate(best_n, ula.N()), alpha};
        fit.objective = std::max(0.0, r_energy - best_score);
        return fit;
    }

    EstimateResult omp_standard(const CVector &y, const SensingSetup &setup, const EstimatorConfig &config)
    {
        check_inputs(y, setup, config);
        const UlaConfig &ula = setup.config;
        const int max_iterations = config.max_paths * config.omp_iteration_factor;

        EstimateResult result;
        std::vector<int> support;
        CVector coeffs;
        CVector residual = y;

        while (residual.norm() > config.residual_tolerance && static_cast<int>(support.size()) < max_iterations)
        {
            const int iteration = static_cast<int>(support.size()) + 1;
            const MatchResult match = match_step(setup.sensing, residual, ula);
            if (std::find(support.begin(), support.end(), match.j_star) != support.end())
                break; // residual is orthogonal to every unused column up to round-off

            support.push_back(match.j_star);
            result.cells.push_back(GridCell{match.m_prime, match.n_prime});

            CMatrix sub(setup.sensing.rows(), static_cast<Eigen::Index>(support.size()));
            for (std::size_t k = 0; k < support.size(); ++k)
                sub.col(static_cast<Eigen::Index>(k)) = setup.sensing.col(support[k] - 1);
            const auto solved = solve_least_squares(sub, y);
            if (!solved)
                throw SingularityError("OMP support submatrix is rank deficient", iteration);
            coeffs = *solved;
            residual = y - sub * coeffs;
            result.residual_history.push_back(residual.norm());
        }

        result.beamspace.values = CMatrix::Zero(ula.N(), ula.M());
        for (std::size_t k = 0; k < support.size(); ++k)
        {
            const GridCell &cell = result.cells[k];
            result.beamspace.at(cell.m, cell.n) = coeffs(static_cast<Eigen::Index>(k));
            result.paths.push_back(VirtualPeak{static_cast<double>(cell.m), static_cast<double>(cell.n),
                                               coeffs(static_cast<Eigen::Index>(k))});
        }
        return finish(std::move(result), setup);
    }

    EstimateResult domp_mlb(const CVector &y, const SensingSetup &setup, const EstimatorConfig &config)
    {
        return dirichlet_pursuit(y, setup, config, lobe_fit(setup, LobeRule::main));
    }

    EstimateResult domp_mslb(const CVector &y, const SensingSetup &setup, const EstimatorConfig &config)
    {
        return dirichlet_pursuit(y, setup, config, lobe_fit(setup, LobeRule::main_and_side));
    }

    EstimateResult domp_lo(const CVector &y, const SensingSetup &setup, const EstimatorConfig &config)
    {
        return dirichlet_pursuit(y, setup, config, [&](const CVector &residual, const GridCell &cell) {
            return localized_fit(setup, residual, cell.m, cell.n, config).peak;
        });
    }

    EstimateResult run_estimator(EstimatorKind kind, const CVector &y, const SensingSetup &setup,
                                 const EstimatorConfig &config)
    {
        switch (kind)
        {
        case EstimatorKind::omp:
            return omp_standard(y, setup, config);
        case EstimatorKind::domp_mlb:
            return domp_mlb(y, setup, config);
        case EstimatorKind::domp_mslb:
            return domp_mslb(y, setup, config);
        case EstimatorKind::domp_lo:
            return domp_lo(y, setup, config);
        }
        throw DomainError("unknown estimator");
    }
}
