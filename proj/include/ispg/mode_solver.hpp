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

// Lossless two-conductor coupled line: modal velocities, mode voltage ratios,
// the asymmetry parameter p and the mode impedances.
//
// With P = L * C, the squared slownesses (1/v^2) of the two modes are the
// eigenvalues of P:
//
//      1/v^2 = (trace(P) -/+ u) / 2,   u = sqrt((P11 - P22)^2 + 4 P12 P21)
//
// The "c" mode is always the "-u" branch and the "pi" mode the "+u" branch.
// Since u >= 0 the pi mode is never the faster one, so
// delta_tau = length * (1/v_pi - 1/v_c) >= 0.

#pragma once

#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace ispg
{

template <typename Scalar>
struct ModeSolution
{
    Scalar v_c = 0, v_pi = 0;                   // m/s
    Scalar gamma_coeff_c = 0, gamma_coeff_pi = 0; // slowness gamma/(i omega), s/m
    Scalar u = 0;                               // (s/m)^2
    Scalar R_c = 0, R_pi = 0;                   // V2/V1 mode ratios
    Scalar p = 1;                               // -R_c / R_pi
    Scalar delta_t_s = 0;                       // 1 - sqrt(p)
    Scalar Z_c1 = 0, Z_c2 = 0, Z_pi1 = 0, Z_pi2 = 0; // ohm
};

// Asymmetry written as a perturbation of a symmetric P matrix:
//
//      P = [[P22 + dc',  P21 + dc''],
//           [P21,        P22      ]]
template <typename Scalar>
struct AsymmetryPerturbation
{
    Scalar delta_c_prime = 0;
    Scalar delta_c_doubleprime = 0;
    Scalar base_P22 = 0;
    Scalar base_P21 = 0;

    // False once either perturbation exceeds 10% of its base entry.
    bool within_small_regime() const
    {
        using std::abs;
        return abs(delta_c_prime) <= Scalar(0.1) * abs(base_P22) &&
               abs(delta_c_doubleprime) <= Scalar(0.1) * abs(base_P21);
    }
};

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> p_matrix(const LcMatrices<Scalar> &lc)
{
    return lc.L * lc.C;
}

template <typename Scalar>
AsymmetryPerturbation<Scalar> asymmetry_perturbation(const LcMatrices<Scalar> &lc)
{
    const Eigen::Matrix<Scalar, 2, 2> P = p_matrix(lc);
    AsymmetryPerturbation<Scalar> out;
    out.base_P22 = P(1, 1);
    out.base_P21 = P(1, 0);
    out.delta_c_prime = P(0, 0) - P(1, 1);
    out.delta_c_doubleprime = P(0, 1) - P(1, 0);
    return out;
}

template <typename Scalar>
ModeSolution<Scalar> solve_modes(const LcMatrices<Scalar> &lc)
{
    using std::abs;
    using std::sqrt;

    const Eigen::Matrix<Scalar, 2, 2> P = p_matrix(lc);
    if (!P.allFinite())
        throw Error(Errc::NonPropagatingMode, "L*C has non-finite entries");

    const Scalar trace = P(0, 0) + P(1, 1);
    const Scalar diff = P(0, 0) - P(1, 1);
    const Scalar disc = diff * diff + Scalar(4) * P(0, 1) * P(1, 0);
    if (disc < Scalar(0))
        throw Error(Errc::NonPropagatingMode, "complex modal slowness (negative discriminant)");

    ModeSolution<Scalar> m;
    m.u = sqrt(disc);
    const Scalar slow2_c = (trace - m.u) / Scalar(2);
    const Scalar slow2_pi = (trace + m.u) / Scalar(2);
    if (!(slow2_c > Scalar(0)) || !(slow2_pi > Scalar(0)))
        throw Error(Errc::NonPropagatingMode, "1/v^2 <= 0 for at least one mode");

    m.gamma_coeff_c = sqrt(slow2_c);
    m.gamma_coeff_pi = sqrt(slow2_pi);
    m.v_c = Scalar(1) / m.gamma_coeff_c;
    m.v_pi = Scalar(1) / m.gamma_coeff_pi;

    // L11 C12 + L12 C22
    const Scalar denom = P(0, 1);
    if (abs(denom) < Scalar(1e-30))
        throw Error(Errc::UncoupledDegenerate, "mode ratio denominator L11*C12 + L12*C22 vanishes");

    m.R_c = (slow2_c - P(0, 0)) / denom;
    m.R_pi = (slow2_pi - P(0, 0)) / denom;
    if (m.R_pi == Scalar(0))
        throw Error(Errc::UncoupledDegenerate, "pi-mode ratio vanishes (one-way coupling)");
    m.p = -m.R_c / m.R_pi;
    if (!(m.p > Scalar(0)))
        throw Error(Errc::NonPropagatingMode, "mode ratios have equal sign, p <= 0");
    m.delta_t_s = Scalar(1) - sqrt(m.p);

    // Mode impedances. With gamma = i*omega*slowness the omega factors cancel,
    // so these are frequency independent in the lossless model.
    const auto &L = lc.L;
    const Scalar det_term = L(0, 1) * L(1, 0) - L(0, 0) * L(1, 1);
    m.Z_c1 = det_term / (m.gamma_coeff_c * (L(0, 1) * m.R_c - L(1, 1)));
    m.Z_c2 = m.R_c * det_term / (m.gamma_coeff_c * (L(1, 0) - L(0, 0) * m.R_c));
    m.Z_pi1 = det_term / (m.gamma_coeff_pi * (L(0, 1) * m.R_pi - L(1, 1)));
    m.Z_pi2 = m.R_pi * det_term / (m.gamma_coeff_pi * (L(1, 0) - L(0, 0) * m.R_pi));
    return m;
}

// |s^4 - tr(P) s^2 + det(P)| / max|P_ij|^2 for slowness s = gamma/(i omega).
// This is the characteristic polynomial divided by omega^4, so the value does
// not depend on frequency.
template <typename Scalar>
Scalar characteristic_residual(const LcMatrices<Scalar> &lc, Scalar gamma_over_omega)
{
    using std::abs;
    const Eigen::Matrix<Scalar, 2, 2> P = p_matrix(lc);
    const Scalar s2 = gamma_over_omega * gamma_over_omega;
    const Scalar poly = s2 * s2 - (P(0, 0) + P(1, 1)) * s2 + (P(0, 0) * P(1, 1) - P(0, 1) * P(1, 0));
    const Scalar scale = P.cwiseAbs().maxCoeff();
    if (scale == Scalar(0))
        return abs(poly);
    return abs(poly) / (scale * scale);
}

// First-order estimate 1 - sqrt(p) ~ (dc' + dc'') / (1/v_c^2 - 1/v_pi^2).
template <typename Scalar>
Scalar estimate_delta_t_s(const AsymmetryPerturbation<Scalar> &pert, Scalar v_c, Scalar v_pi)
{
    using std::abs;
    const Scalar denom = Scalar(1) / (v_c * v_c) - Scalar(1) / (v_pi * v_pi);
    if (!(abs(denom) >= Scalar(1e-30)))
        throw Error(Errc::DegenerateVelocities, "c and pi mode velocities coincide");
    return (pert.delta_c_prime + pert.delta_c_doubleprime) / denom;
}

// SC segment for a physical line of the given length.
//
//   delta_tau = length * (1/v_pi - 1/v_c)
//   t_s       = -length * (dc' + dc'') / (1/v_c + 1/v_pi)
//
// The second line is the skew amplitude length / v_s with
// v_s = (v_c + v_pi) / ((dc' + dc'') v_c v_pi), negated so that a positive
// t_s is the low-frequency skew produced by the exact S-parameters of the
// same line. Without an explicit perturbation, dc' + dc'' is recovered from
// the exact 1 - sqrt(p) through the first-order estimate, which reduces to
// t_s = (1 - sqrt(p)) * delta_tau.
template <typename Scalar>
SegmentSpec<Scalar> derive_segment(const LcMatrices<Scalar> &lc, Scalar length,
                                   const std::optional<AsymmetryPerturbation<Scalar>> &pert = std::nullopt)
{
    if (!(length > Scalar(0)))
        throw Error(Errc::NegativeLength, "segment length must be positive");

    const ModeSolution<Scalar> m = solve_modes(lc);
    const Scalar slow_sum = m.gamma_coeff_c + m.gamma_coeff_pi;
    const Scalar delta_tau = length * (m.gamma_coeff_pi - m.gamma_coeff_c);
    if (delta_tau == Scalar(0))
        throw Error(Errc::DegenerateVelocities, "c and pi mode velocities coincide, segment is not strongly coupled");

    Scalar dc_sum;
    if (pert)
        dc_sum = pert->delta_c_prime + pert->delta_c_doubleprime;
    else
        dc_sum = m.delta_t_s * (m.gamma_coeff_c * m.gamma_coeff_c - m.gamma_coeff_pi * m.gamma_coeff_pi);

    SegmentSpec<Scalar> seg = SegmentSpec<Scalar>::sc(delta_tau, -length * dc_sum / slow_sum);
    seg.physical = PhysicalSegment<Scalar>{lc, length, Scalar(0)};
    return seg;
}

// Checks segment invariants. SC segments carrying physical data are
// re-derived and must agree with the declared (delta_tau, t_s) within 1e-15 s.
template <typename Scalar>
SegmentSpec<Scalar> validate_segment(const SegmentSpec<Scalar> &s)
{
    using std::abs;
    using std::isfinite;
    if (!isfinite(static_cast<double>(s.t_l)) || !isfinite(static_cast<double>(s.delta_tau)) ||
        !isfinite(static_cast<double>(s.t_s)))
        throw Error(Errc::InvalidSegment, "segment parameters must be finite");

    if (s.is_lc())
    {
        if (s.delta_tau != Scalar(0) || s.t_s != Scalar(0))
            throw Error(Errc::InvalidSegment, "LC segments carry no delta_tau or t_s");
        if (s.physical)
            throw Error(Errc::InvalidSegment, "physical parameters are only meaningful for SC segments");
        return s;
    }

    if (s.t_l != Scalar(0))
        throw Error(Errc::InvalidSegment, "SC segments carry no t_l (use physical.t_l_prepend)");

    if (s.physical)
    {
        if (!(s.physical->length > Scalar(0)))
            throw Error(Errc::NegativeLength, "physical segment length must be positive");
        const SegmentSpec<Scalar> derived = derive_segment(s.physical->lc, s.physical->length);
        if (abs(derived.delta_tau - s.delta_tau) > Scalar(1e-15) || abs(derived.t_s - s.t_s) > Scalar(1e-15))
            throw Error(Errc::InconsistentPhysicalParams,
                        "declared delta_tau/t_s disagree with values derived from L, C and length");
    }
    if (s.delta_tau == Scalar(0))
        throw Error(Errc::InvalidSegment, "SC segments need a non-zero delta_tau");
    return s;
}

} // namespace ispg
