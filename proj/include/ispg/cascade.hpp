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

// Exact cascade of matched segments and the skew oracle built on it.
//
// Segments are reflectionless, so cascading is a product of the 2x2
// transmission blocks. For segments 1..N in signal order
//
//      forward = A_N ... A_2 A_1        reverse = R_1 R_2 ... R_N
//
// oracle_skew never touches the sweep formulas: it synthesizes every node,
// cascades and re-extracts the skew from phases.

#pragma once

#include "ispg.hpp"
#include "mode_solver.hpp"
#include "skew.hpp"
#include "sparam.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ispg
{

template <typename Scalar>
struct CascadeResult
{
    FourPortResponse<Scalar> response;
    std::vector<FourPortResponse<Scalar>> per_segment;
};

template <typename Scalar>
CascadeResult<Scalar> cascade(const std::vector<FourPortResponse<Scalar>> &segments, const ExecPolicy &policy = {})
{
    if (segments.empty())
        throw Error(Errc::InvalidSegment, "nothing to cascade");
    const FrequencyGrid<Scalar> &grid = segments.front().grid;
    for (const auto &s : segments)
        if (!(s.grid == grid) || s.forward.size() != grid.size() || s.reverse.size() != grid.size())
            throw Error(Errc::GridMismatch, "cascaded segments must share one frequency grid");

    CascadeResult<Scalar> out;
    out.per_segment = segments;
    out.response.grid = grid;
    out.response.forward.resize(grid.size());
    out.response.reverse.resize(grid.size());
    out.response.reciprocal =
        std::all_of(segments.begin(), segments.end(), [](const auto &s) { return s.reciprocal; });

    detail::parallel_for(grid.size(), policy, [&](std::size_t k) {
        Block<Scalar> fwd = segments.front().forward[k];
        Block<Scalar> rev = segments.front().reverse[k];
        for (std::size_t i = 1; i < segments.size(); ++i)
        {
            fwd = (segments[i].forward[k] * fwd).eval();
            rev = (rev * segments[i].reverse[k]).eval();
        }
        out.response.forward[k] = fwd;
        out.response.reverse[k] = rev;
    });
    return out;
}

// Exact synthesis parameters for one node.
//
// Physical SC nodes use the mode solution of their L, C and length. Declared
// SC nodes carry only (delta_tau, t_s); the single-segment low-frequency skew
// of the exact response is delta_tau (1 - p) / (1 + p), so pinning it to t_s
// gives p = (1 - a) / (1 + a) with a = t_s / delta_tau. The common delay of a
// declared node is 5 |delta_tau|.
template <typename Scalar>
SegmentSynthParams<Scalar> synth_params_for(const SegmentSpec<Scalar> &s)
{
    using std::abs;
    SegmentSynthParams<Scalar> out;
    if (s.is_lc())
    {
        out.t_l = s.t_l;
        return out;
    }
    if (s.physical)
    {
        const ModeSolution<Scalar> m = solve_modes(s.physical->lc);
        const Scalar len = s.physical->length;
        out.p = m.p;
        out.delta_tau = len * (m.gamma_coeff_pi - m.gamma_coeff_c);
        out.common_delay = len * (m.gamma_coeff_c + m.gamma_coeff_pi) / Scalar(2);
        out.t_l = s.physical->t_l_prepend;
        return out;
    }
    if (s.delta_tau == Scalar(0))
        throw Error(Errc::ZeroDeltaTau, "SC node needs a non-zero delta_tau");
    const Scalar a = s.t_s / s.delta_tau;
    if (!(abs(a) < Scalar(1)))
        throw Error(Errc::InvalidSegment, "|t_s| must be smaller than |delta_tau| for an exact synthesis");
    out.p = (Scalar(1) - a) / (Scalar(1) + a);
    out.delta_tau = s.delta_tau;
    out.common_delay = Scalar(5) * abs(s.delta_tau);
    return out;
}

// Bound on the delay of the phase ratios that extract_skew unwraps.
template <typename Scalar>
Scalar skew_delay_bound(const IspgGraph<Scalar> &graph)
{
    using std::abs;
    Scalar acc = 0;
    for (const auto &n : graph.nodes)
    {
        acc += abs(n.t_l) + abs(n.delta_tau) + abs(n.t_s);
        if (n.physical)
            acc += abs(n.physical->t_l_prepend);
    }
    return acc;
}

template <typename Scalar>
FourPortResponse<Scalar> synthesize_graph(const IspgGraph<Scalar> &graph, const FrequencyGrid<Scalar> &grid,
                                          const ExecPolicy &policy = {})
{
    if (graph.nodes.empty())
        throw Error(Errc::InvalidSegment, "a graph needs at least one node");
    std::vector<FourPortResponse<Scalar>> parts;
    parts.reserve(graph.nodes.size());
    for (const auto &n : graph.nodes)
        parts.push_back(synth_segment(synth_params_for(n), grid, policy));
    return cascade(parts, policy).response;
}

// Exact-cascade skew profile for the graph. Node order is physical, so for a
// right_to_left graph the two extracted directions are swapped to match
// evaluate_profile.
template <typename Scalar>
SkewProfile<Scalar> oracle_skew(const IspgGraph<Scalar> &graph, const FrequencyGrid<Scalar> &grid,
                                const ExecPolicy &policy = {})
{
    const FourPortResponse<Scalar> resp = synthesize_graph(graph, grid, policy);
    SkewProfile<Scalar> prof = extract_skew(resp, skew_delay_bound(graph));
    if (graph.direction == Direction::right_to_left)
        std::swap(prof.skew_21, prof.skew_12);
    return prof;
}

template <typename Scalar>
struct ProfileComparison
{
    Scalar rms = 0;               // both directions pooled, s
    Scalar max_abs = 0;           // s
    Scalar peak_to_peak_ref = 0;  // larger of the two reference directions, s
    Scalar rms_21 = 0, rms_12 = 0;
    Scalar peak_to_peak_21 = 0, peak_to_peak_12 = 0;
};

template <typename Scalar>
ProfileComparison<Scalar> compare_profiles(const SkewProfile<Scalar> &candidate, const SkewProfile<Scalar> &reference)
{
    using std::sqrt;
    if (!(candidate.grid == reference.grid) || candidate.skew_21.size() != reference.skew_21.size() ||
        candidate.skew_12.size() != reference.skew_12.size())
        throw Error(Errc::GridMismatch, "profiles are on different grids");

    const RealVector<Scalar> e21 = candidate.skew_21 - reference.skew_21;
    const RealVector<Scalar> e12 = candidate.skew_12 - reference.skew_12;
    const auto n = static_cast<Scalar>(e21.size());

    ProfileComparison<Scalar> c;
    if (e21.size() == 0)
        return c;
    c.rms_21 = sqrt(e21.squaredNorm() / n);
    c.rms_12 = sqrt(e12.squaredNorm() / n);
    c.rms = sqrt((e21.squaredNorm() + e12.squaredNorm()) / (Scalar(2) * n));
    c.max_abs = std::max(e21.cwiseAbs().maxCoeff(), e12.cwiseAbs().maxCoeff());
    c.peak_to_peak_21 = reference.skew_21.maxCoeff() - reference.skew_21.minCoeff();
    c.peak_to_peak_12 = reference.skew_12.maxCoeff() - reference.skew_12.minCoeff();
    c.peak_to_peak_ref = std::max(c.peak_to_peak_21, c.peak_to_peak_12);
    return c;
}

} // namespace ispg
