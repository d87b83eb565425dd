// SPDX-License-Identifier: Apache-2.0
//
// ispg - intra-pair skew modelling for cascaded coupled transmission lines
// Copyright (C) 2026 The ispg authors
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

// Least-squares fit of graph parameters to a measured skew_21 profile.
//
// Search:
//   delta_tau unknowns   centre +/- 10 %, step 0.5 ps (centre = template value,
//                        or the hint when the template value is 0)
//   t_l / t_s unknowns   [-10, 10] ps on a 0.1 ps lattice
//
// The sweep is linear in every t_l and t_s, so for each delta_tau candidate
// the best lattice point is found by a linear least-squares solve, clamped
// and rounded to the lattice, instead of enumerating it. The best grid point
// then seeds a Nelder-Mead descent (units of ps) on the RMS residual.

#pragma once

#include "ispg.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ispg
{

enum class FitField
{
    t_l,
    delta_tau,
    t_s
};

struct FitUnknown
{
    std::size_t node = 0; // 0-based index into graph.nodes
    FitField field = FitField::t_l;

    bool operator==(const FitUnknown &o) const { return node == o.node && field == o.field; }
};

template <typename Scalar>
struct FitResult
{
    IspgGraph<Scalar> graph;
    Scalar residual_rms = 0;      // s, after refinement
    Scalar grid_residual_rms = 0; // s, best coarse-grid point
    std::size_t iterations = 0;   // simplex iterations
};

struct FitOptions
{
    double t_range_ps = 10.0;
    double t_step_ps = 0.1;
    double delta_tau_rel_range = 0.1;
    double delta_tau_step_ps = 0.5;
    std::size_t max_iterations = 4000;
    double tolerance_ps = 1e-9; // simplex spread in residual
};

namespace detail
{

template <typename Scalar>
Scalar &field_ref(SegmentSpec<Scalar> &s, FitField f)
{
    switch (f)
    {
    case FitField::t_l: return s.t_l;
    case FitField::delta_tau: return s.delta_tau;
    case FitField::t_s: return s.t_s;
    }
    return s.t_l;
}

template <typename Scalar>
void check_unknowns(const IspgGraph<Scalar> &g, const std::vector<FitUnknown> &unk)
{
    if (unk.empty())
        throw Error(Errc::ConfigError, "no unknowns to fit");
    if (unk.size() > 5)
        throw Error(Errc::OverParameterized, "at most 5 unknowns can be fitted, got " + std::to_string(unk.size()));
    for (std::size_t i = 0; i < unk.size(); ++i)
    {
        const auto &u = unk[i];
        if (u.node >= g.nodes.size())
            throw Error(Errc::ConfigError, "fit unknown refers to node " + std::to_string(u.node + 1) + " which does not exist");
        const bool lc = g.nodes[u.node].is_lc();
        if (lc != (u.field == FitField::t_l))
            throw Error(Errc::ConfigError, "fit field does not exist on node " + std::to_string(u.node + 1));
        for (std::size_t j = 0; j < i; ++j)
            if (unk[j] == u)
                throw Error(Errc::ConfigError, "duplicate fit unknown");
    }
}

template <typename Scalar>
Scalar rms_residual(const IspgGraph<Scalar> &g, const SkewProfile<Scalar> &measured)
{
    Scalar acc = 0;
    for (std::size_t k = 0; k < measured.grid.size(); ++k)
    {
        const Scalar e = counter_sweep(g, measured.grid[k]).total_skew - measured.skew_21[static_cast<Eigen::Index>(k)];
        acc += e * e;
    }
    using std::sqrt;
    return sqrt(acc / Scalar(measured.grid.size()));
}

// Minimizes fn over R^n from x0 with per-coordinate initial steps.
template <typename Fn>
std::vector<double> nelder_mead(Fn &&fn, std::vector<double> x0, const std::vector<double> &step, std::size_t max_iter,
                                double tol, std::size_t &iterations)
{
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> s(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i)
        s[i + 1][i] += step[i];
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        fv[i] = fn(s[i]);

    std::vector<std::size_t> idx(n + 1);
    iterations = 0;
    for (; iterations < max_iter; ++iterations)
    {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = idx.front(), worst = idx.back(), second = idx[n - 1];
        if (fv[worst] - fv[best] <= tol)
            break;

        std::vector<double> c(n, 0.0);
        for (std::size_t i : idx)
            if (i != worst)
                for (std::size_t d = 0; d < n; ++d)
                    c[d] += s[i][d] / double(n);

        auto along = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t d = 0; d < n; ++d)
                x[d] = c[d] + t * (s[worst][d] - c[d]);
            return x;
        };

        const auto xr = along(-1.0);
        const double fr = fn(xr);
        if (fr < fv[best])
        {
            const auto xe = along(-2.0);
            const double fe = fn(xe);
            if (fe < fr)
                s[worst] = xe, fv[worst] = fe;
            else
                s[worst] = xr, fv[worst] = fr;
        }
        else if (fr < fv[second])
            s[worst] = xr, fv[worst] = fr;
        else
        {
            const auto xc = fr < fv[worst] ? along(-0.5) : along(0.5);
            const double fc = fn(xc);
            if (fc < std::min(fr, fv[worst]))
                s[worst] = xc, fv[worst] = fc;
            else
                for (std::size_t i = 0; i <= n; ++i)
                {
                    if (i == best)
                        continue;
                    for (std::size_t d = 0; d < n; ++d)
                        s[i][d] = s[best][d] + 0.5 * (s[i][d] - s[best][d]);
                    fv[i] = fn(s[i]);
                }
        }
    }
    const auto it = std::min_element(fv.begin(), fv.end());
    return s[static_cast<std::size_t>(it - fv.begin())];
}

} // namespace detail

template <typename Scalar>
FitResult<Scalar> fit_parameters(const SkewProfile<Scalar> &measured, const IspgGraph<Scalar> &templ,
                                 const std::vector<FitUnknown> &unknowns, Scalar delta_tau_hint,
                                 const FitOptions &opt = {})
{
    using std::abs;
    constexpr double ps = 1e-12;

    detail::check_unknowns(templ, unknowns);
    if (static_cast<std::size_t>(measured.skew_21.size()) != measured.grid.size() || measured.grid.size() == 0)
        throw Error(Errc::GridMismatch, "measured profile does not match its grid");
    if (!((measured.grid.back() - measured.grid.front()) * abs(delta_tau_hint) >= Scalar(2)))
        throw Error(Errc::InsufficientBandwidth, "measured band covers fewer than two oscillation periods of delta_tau");

    std::vector<std::size_t> dt_unk, t_unk;
    for (std::size_t i = 0; i < unknowns.size(); ++i)
        (unknowns[i].field == FitField::delta_tau ? dt_unk : t_unk).push_back(i);

    IspgGraph<Scalar> work = templ;
    for (const auto &u : unknowns)
        work.nodes[u.node].physical.reset();

    // delta_tau candidate lattices, one per delta_tau unknown
    std::vector<std::vector<double>> dt_cand;
    for (std::size_t i : dt_unk)
    {
        const auto &u = unknowns[i];
        const double centre_ps =
            double(templ.nodes[u.node].delta_tau != Scalar(0) ? templ.nodes[u.node].delta_tau : delta_tau_hint) / ps;
        const double half = abs(centre_ps) * opt.delta_tau_rel_range;
        const auto steps = static_cast<long>(std::floor(half / opt.delta_tau_step_ps + 1e-9));
        std::vector<double> c;
        for (long s = -steps; s <= steps; ++s)
            c.push_back(centre_ps + double(s) * opt.delta_tau_step_ps);
        dt_cand.push_back(std::move(c));
    }

    const std::size_t K = measured.grid.size();
    const auto sweep_vec = [&](const IspgGraph<Scalar> &g) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(K));
        for (std::size_t k = 0; k < K; ++k)
            v[static_cast<Eigen::Index>(k)] = double(counter_sweep(g, measured.grid[k]).total_skew) / ps;
        return v;
    };
    Eigen::VectorXd y(static_cast<Eigen::Index>(K));
    for (std::size_t k = 0; k < K; ++k)
        y[static_cast<Eigen::Index>(k)] = double(measured.skew_21[static_cast<Eigen::Index>(k)]) / ps;

    const auto apply = [&](IspgGraph<Scalar> &g, const std::vector<double> &x_ps) {
        for (std::size_t i = 0; i < unknowns.size(); ++i)
            detail::field_ref(g.nodes[unknowns[i].node], unknowns[i].field) = Scalar(x_ps[i] * ps);
    };

    std::vector<double> best_x(unknowns.size(), 0.0);
    double best_res = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> odo(dt_unk.size(), 0);
    for (;;)
    {
        std::vector<double> x(unknowns.size(), 0.0);
        for (std::size_t j = 0; j < dt_unk.size(); ++j)
            x[dt_unk[j]] = dt_cand[j][odo[j]];

        IspgGraph<Scalar> g = work;
        apply(g, x);
        const Eigen::VectorXd base = sweep_vec(g);
        if (!t_unk.empty())
        {
            Eigen::MatrixXd A(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(t_unk.size()));
            for (std::size_t j = 0; j < t_unk.size(); ++j)
            {
                IspgGraph<Scalar> gj = g;
                detail::field_ref(gj.nodes[unknowns[t_unk[j]].node], unknowns[t_unk[j]].field) = Scalar(ps);
                A.col(static_cast<Eigen::Index>(j)) = sweep_vec(gj) - base;
            }
            const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(y - base);
            for (std::size_t j = 0; j < t_unk.size(); ++j)
            {
                double v = std::clamp(sol[static_cast<Eigen::Index>(j)], -opt.t_range_ps, opt.t_range_ps);
                if (!std::isfinite(v))
                    v = 0.0;
                x[t_unk[j]] = std::round(v / opt.t_step_ps) * opt.t_step_ps;
            }
            apply(g, x);
        }
        const double res = (sweep_vec(g) - y).norm() / std::sqrt(double(K));
        if (res < best_res)
            best_res = res, best_x = x;

        std::size_t j = 0;
        while (j < odo.size() && ++odo[j] == dt_cand[j].size())
            odo[j++] = 0;
        if (j == odo.size())
            break;
    }

    std::vector<double> step(unknowns.size());
    for (std::size_t i = 0; i < unknowns.size(); ++i)
        step[i] = unknowns[i].field == FitField::delta_tau ? opt.delta_tau_step_ps : opt.t_step_ps;

    const auto objective = [&](const std::vector<double> &x) {
        IspgGraph<Scalar> g = work;
        apply(g, x);
        const double r = (sweep_vec(g) - y).norm() / std::sqrt(double(K));
        return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
    };

    FitResult<Scalar> out;
    const std::vector<double> x =
        detail::nelder_mead(objective, best_x, step, opt.max_iterations, opt.tolerance_ps, out.iterations);
    const double refined = objective(x);
    if (!std::isfinite(refined) || !std::isfinite(best_res) || refined > best_res)
        throw Error(Errc::NonConvergent, "refinement did not improve on the coarse-grid optimum");

    out.graph = work;
    apply(out.graph, x);
    out.residual_rms = Scalar(refined * ps);
    out.grid_residual_rms = Scalar(best_res * ps);
    return out;
}

} // namespace ispg
