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

// Exact single-ended S-parameters of a matched, lossless, asymmetric coupled
// segment with an optional single-ended delay t_l in front of the P line,
// plus the mixed-mode conversion and the small-asymmetry magnitude expansions.

#pragma once

#include "types.hpp"

#include <cmath>

namespace ispg
{

template <typename Scalar>
struct SegmentSynthParams
{
    Scalar p = 1;            // asymmetry parameter, 1 for a symmetric pair
    Scalar delta_tau = 0;    // tau_pi - tau_c, s
    Scalar common_delay = 0; // average modal delay length*(1/v_c + 1/v_pi)/2, s
    Scalar t_l = 0;          // delay in front of the P line, s
};

template <typename Scalar>
void check_synth_params(const SegmentSynthParams<Scalar> &params)
{
    using std::isfinite;
    if (!(params.p > Scalar(0)) || !isfinite(static_cast<double>(params.p)))
        throw Error(Errc::InvalidSegment, "p must be positive and finite");
    if (!(params.common_delay >= Scalar(0)))
        throw Error(Errc::InvalidSegment, "common_delay must be non-negative");
    if (!isfinite(static_cast<double>(params.delta_tau)) || !isfinite(static_cast<double>(params.t_l)))
        throw Error(Errc::InvalidSegment, "delay parameters must be finite");
}

// Forward block [[S21, S23], [S41, S43]] at one frequency.
//
// With x the half mode phase difference and E the common propagation phase:
//   S21 = (cos x - i (1-p)/(1+p) sin x) E e^{+i 2 pi f t_l}
//   S43 = (cos x + i (1-p)/(1+p) sin x) E
//   S41 = -2i sqrt(p)/(1+p) sin x E e^{+i 2 pi f t_l},   S23 = -2i sqrt(p)/(1+p) sin x E
// The phase terms use tau_c - tau_pi = -delta_tau.
template <typename Scalar>
Block<Scalar> synth_block(const SegmentSynthParams<Scalar> &params, Scalar f)
{
    using std::cos;
    using std::sin;
    using std::sqrt;
    using C = Complex<Scalar>;

    const Scalar two_pi_f = Scalar(2) * pi_v<Scalar> * f;
    const Scalar x = -pi_v<Scalar> * f * params.delta_tau;
    const Scalar a = (Scalar(1) - params.p) / (Scalar(1) + params.p);
    const Scalar b = Scalar(2) * sqrt(params.p) / (Scalar(1) + params.p);
    const Scalar cx = cos(x), sx = sin(x);

    const C E = std::polar(Scalar(1), -two_pi_f * params.common_delay);
    const C D = std::polar(Scalar(1), two_pi_f * params.t_l);

    const C s21 = C(cx, -a * sx) * E;
    const C s43 = C(cx, a * sx) * E;
    const C cpl = C(Scalar(0), -b * sx) * E;

    Block<Scalar> blk;
    blk << s21 * D, cpl,
           cpl * D, s43;
    return blk;
}

template <typename Scalar>
FourPortResponse<Scalar> synth_segment(const SegmentSynthParams<Scalar> &params, const FrequencyGrid<Scalar> &grid,
                                       const ExecPolicy &policy = {})
{
    check_synth_params(params);
    FourPortResponse<Scalar> out;
    out.grid = grid;
    out.forward.resize(grid.size());
    out.reverse.resize(grid.size());
    detail::parallel_for(grid.size(), policy, [&](std::size_t k) {
        out.forward[k] = synth_block(params, grid[k]);
        out.reverse[k] = out.forward[k].transpose();
    });
    out.reciprocal = true;
    return out;
}

// Single-ended delay t_l on the P line only.
template <typename Scalar>
FourPortResponse<Scalar> synth_lc_segment(Scalar t_l, const FrequencyGrid<Scalar> &grid, const ExecPolicy &policy = {})
{
    SegmentSynthParams<Scalar> params;
    params.t_l = t_l;
    return synth_segment(params, grid, policy);
}

template <typename Scalar>
MixedModeResponse<Scalar> to_mixed_mode(const FourPortResponse<Scalar> &resp)
{
    using C = Complex<Scalar>;
    const std::size_t n = resp.size();
    const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
    const Scalar half = Scalar(0.5);

    MixedModeResponse<Scalar> mm;
    mm.grid = resp.grid;
    for (auto *v : {&mm.sdd21, &mm.scc21, &mm.scd21, &mm.sdc21, &mm.ssd21, &mm.ssd41, &mm.ssd12, &mm.ssd32})
        v->resize(static_cast<Eigen::Index>(n));

    for (std::size_t k = 0; k < n; ++k)
    {
        const auto &F = resp.forward[k];
        const auto &R = resp.reverse[k];
        const C s21 = F(0, 0), s23 = F(0, 1), s41 = F(1, 0), s43 = F(1, 1);
        const C s12 = R(0, 0), s14 = R(0, 1), s32 = R(1, 0), s34 = R(1, 1);
        const auto i = static_cast<Eigen::Index>(k);

        mm.ssd21[i] = (s21 - s23) * inv_sqrt2;
        mm.ssd41[i] = (s43 - s41) * inv_sqrt2;
        mm.ssd12[i] = (s12 - s14) * inv_sqrt2;
        mm.ssd32[i] = (s34 - s32) * inv_sqrt2;
        mm.sdd21[i] = half * (s21 - s23 - s41 + s43);
        mm.scc21[i] = half * (s21 + s23 + s41 + s43);
        mm.scd21[i] = half * (s21 - s23 + s41 - s43);
        mm.sdc21[i] = half * (s21 + s23 - s41 - s43);
    }
    return mm;
}

template <typename Scalar>
struct MagnitudeExpansion
{
    Scalar sdd21_sq = 0; // also |Scc21|^2
    Scalar scd21_sq = 0;
    Scalar s21_sq = 0; // also |S43|^2
    Scalar s41_sq = 0; // also |S23|^2
    bool in_regime = true; // |1 - sqrt(p)| < 0.3
};

// Second-order expansions in dts = 1 - sqrt(p).
template <typename Scalar>
MagnitudeExpansion<Scalar> magnitude_expansions(Scalar p, Scalar delta_tau, Scalar t_l, Scalar f)
{
    using std::abs;
    using std::cos;
    using std::sin;
    using std::sqrt;

    const Scalar pi = pi_v<Scalar>;
    const Scalar dts = Scalar(1) - sqrt(p);
    const Scalar w = Scalar(2) * pi * f;

    const Scalar second = Scalar(0.125) * cos(w * (delta_tau - t_l)) + Scalar(0.375) * cos(w * (delta_tau + t_l)) -
                          Scalar(0.5) * cos(w * t_l);
    const Scalar first = Scalar(0.5) * sin(w * delta_tau) * sin(w * t_l);
    const Scalar c_tl = cos(pi * f * t_l), s_tl = sin(pi * f * t_l);
    const Scalar s_dt = sin(pi * f * delta_tau), c_dt = cos(pi * f * delta_tau);

    MagnitudeExpansion<Scalar> e;
    e.sdd21_sq = c_tl * c_tl - first * dts + second * dts * dts;
    e.scd21_sq = s_tl * s_tl + first * dts - second * dts * dts;
    e.s21_sq = c_dt * c_dt + s_dt * s_dt * dts * dts;
    e.s41_sq = s_dt * s_dt - s_dt * s_dt * dts * dts;
    e.in_regime = abs(dts) < Scalar(0.3);
    return e;
}

} // namespace ispg
