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

// Skew extraction from S-parameter phases, the first-order closed forms, and
// the mode delay difference / resonance helpers.
//
// extract_skew is exact (phase based); closed_form_skew is the first-order
// approximation in 1 - sqrt(p). Tests compare the two explicitly.

#pragma once

#include "sparam.hpp"
#include "types.hpp"

#include <cmath>
#include <vector>

namespace ispg
{

template <typename Scalar>
struct UnwrappedPhase
{
    FrequencyGrid<Scalar> grid;
    RealVector<Scalar> phase; // rad, continuous along the grid
};

// Continuous phase of `series`, anchored to the principal value at the first
// grid point. When `max_delay` (s) is positive the grid must satisfy the
// Nyquist condition max_spacing < 1 / (2 * max_delay). A principal-value jump
// within 1e-9 rad of pi is ambiguous and always rejected.
template <typename Scalar>
UnwrappedPhase<Scalar> unwrap(const ComplexVector<Scalar> &series, const FrequencyGrid<Scalar> &grid,
                              Scalar max_delay = Scalar(0))
{
    using std::abs;
    using std::arg;
    using std::round;

    if (static_cast<std::size_t>(series.size()) != grid.size())
        throw Error(Errc::GridMismatch, "series length does not match the grid");
    if (max_delay > Scalar(0) && grid.max_spacing() * max_delay * Scalar(2) >= Scalar(1))
        throw Error(Errc::GridTooCoarse, "grid step exceeds the Nyquist limit for the stated delay");

    const Scalar two_pi = Scalar(2) * pi_v<Scalar>;
    UnwrappedPhase<Scalar> out;
    out.grid = grid;
    out.phase.resize(series.size());
    if (series.size() == 0)
        return out;

    Scalar prev = arg(series[0]);
    out.phase[0] = prev;
    for (Eigen::Index k = 1; k < series.size(); ++k)
    {
        const Scalar cur = arg(series[k]);
        Scalar step = cur - prev;
        step -= two_pi * round(step / two_pi);
        if (abs(abs(step) - pi_v<Scalar>) < Scalar(1e-9))
            throw Error(Errc::GridTooCoarse, "phase step of exactly pi at point " + std::to_string(k) + " is ambiguous");
        out.phase[k] = out.phase[k - 1] + step;
        prev = cur;
    }
    return out;
}

namespace detail
{

// Unwrapped phase of num/den divided by 2 pi f.
template <typename Scalar>
RealVector<Scalar> phase_delay_of_ratio(const ComplexVector<Scalar> &num, const ComplexVector<Scalar> &den,
                                        const FrequencyGrid<Scalar> &grid, Scalar max_delay)
{
    const ComplexVector<Scalar> ratio = num.cwiseQuotient(den);
    const UnwrappedPhase<Scalar> ph = unwrap(ratio, grid, max_delay);
    RealVector<Scalar> out(ph.phase.size());
    for (Eigen::Index k = 0; k < out.size(); ++k)
        out[k] = ph.phase[k] / (Scalar(2) * pi_v<Scalar> * grid[static_cast<std::size_t>(k)]);
    return out;
}

} // namespace detail

// skew_21 = [phase(Ssd21) - phase(Ssd41)] / (2 pi f)
// skew_12 = [phase(Ssd12) - phase(Ssd32)] / (2 pi f)
//
// The phase difference is unwrapped as the phase of the ratio, so it starts at
// its principal value (close to zero for any physical skew) at f_min.
template <typename Scalar>
SkewProfile<Scalar> extract_skew(const MixedModeResponse<Scalar> &mm, Scalar max_delay = Scalar(0))
{
    SkewProfile<Scalar> out;
    out.grid = mm.grid;
    out.skew_21 = detail::phase_delay_of_ratio(mm.ssd21, mm.ssd41, mm.grid, max_delay);
    out.skew_12 = detail::phase_delay_of_ratio(mm.ssd12, mm.ssd32, mm.grid, max_delay);
    return out;
}

template <typename Scalar>
SkewProfile<Scalar> extract_skew(const FourPortResponse<Scalar> &resp, Scalar max_delay = Scalar(0))
{
    return extract_skew(to_mixed_mode(resp), max_delay);
}

// Signed mode delay difference [phase(Scc21) - phase(Sdd21)] / (2 pi f),
// positive when the pi mode is the slower one.
template <typename Scalar>
RealVector<Scalar> delta_tau_signed(const MixedModeResponse<Scalar> &mm, Scalar max_delay = Scalar(0))
{
    return detail::phase_delay_of_ratio(mm.scc21, mm.sdd21, mm.grid, max_delay);
}

// Delta tau(f) = |phase(Sdd21) - phase(Scc21)| / (2 pi f), unwrapped.
template <typename Scalar>
RealVector<Scalar> delta_tau_from_mixed(const MixedModeResponse<Scalar> &mm, Scalar max_delay = Scalar(0))
{
    return delta_tau_signed(mm, max_delay).cwiseAbs();
}

// First-order skew of LC(t_l) followed by an SC(delta_tau, t_s) segment.
//   skew_12 = t_l + t_s sinc(2 pi f dtau)
//   skew_21 = cos(2 pi f dtau) t_l + t_s sinc(2 pi f dtau)
template <typename Scalar>
SkewProfile<Scalar> closed_form_skew(Scalar t_l, Scalar delta_tau, Scalar t_s, const FrequencyGrid<Scalar> &grid)
{
    using std::cos;
    SkewProfile<Scalar> out;
    out.grid = grid;
    out.skew_21.resize(static_cast<Eigen::Index>(grid.size()));
    out.skew_12.resize(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
        const Scalar arg = Scalar(2) * pi_v<Scalar> * grid[k] * delta_tau;
        const Scalar damped = t_s * sinc(arg);
        const auto i = static_cast<Eigen::Index>(k);
        out.skew_12[i] = t_l + damped;
        out.skew_21[i] = cos(arg) * t_l + damped;
    }
    return out;
}

template <typename Scalar>
void check_delta_tau(Scalar delta_tau)
{
    using std::abs;
    if (!(abs(delta_tau) > Scalar(0)) || !std::isfinite(static_cast<double>(delta_tau)))
        throw Error(Errc::ZeroDeltaTau, "delta_tau must be non-zero and finite");
}

// Through-path minima: f_n = 1/(2 dtau) + (n - 1)/dtau, n = 1..n_max.
template <typename Scalar>
std::vector<Scalar> resonance_freqs(Scalar delta_tau, std::size_t n_max)
{
    check_delta_tau(delta_tau);
    using std::abs;
    const Scalar dt = abs(delta_tau);
    std::vector<Scalar> out;
    out.reserve(n_max);
    for (std::size_t n = 1; n <= n_max; ++n)
        out.push_back(Scalar(1) / (Scalar(2) * dt) + Scalar(n - 1) / dt);
    return out;
}

// Zero-skew frequencies of a t_l = 0 segment: f_0 = n/(2 dtau), n = 1..n_max.
template <typename Scalar>
std::vector<Scalar> skew_zero_freqs(Scalar delta_tau, std::size_t n_max)
{
    check_delta_tau(delta_tau);
    using std::abs;
    const Scalar dt = abs(delta_tau);
    std::vector<Scalar> out;
    out.reserve(n_max);
    for (std::size_t n = 1; n <= n_max; ++n)
        out.push_back(Scalar(n) / (Scalar(2) * dt));
    return out;
}

} // namespace ispg
