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

#include "test_helpers.hpp"

#include <random>

using namespace ispg;

// Reference values below were produced by a general-purpose 2x2 eigensolver
// (eigenvalues of L*C, eigenvector component ratios) and frozen.

TEST(SolveModes, AsymmetricPairFrozenValues)
{
    const ModeSolution<double> m = solve_modes(make_lc(400, 120, 120, 400, 100, -20, -20, 105));
    EXPECT_NEAR(m.v_c / 171007750.67899513, 1.0, 1e-13);
    EXPECT_NEAR(m.v_pi / 152490514.95179337, 1.0, 1e-13);
    EXPECT_NEAR(m.R_c, -0.7401180671976195, 1e-13);
    EXPECT_NEAR(m.R_pi, 1.1749006758932714, 1e-13);
    EXPECT_NEAR(m.p, 0.6299409664011907, 1e-13);
    EXPECT_NEAR(m.delta_t_s, 0.20631179522359622, 1e-13);
}

TEST(SolveModes, InductiveAsymmetryFrozenValues)
{
    const ModeSolution<double> m = solve_modes(make_lc(420, 120, 120, 400, 100, -20, -20, 100));
    EXPECT_NEAR(m.v_c / 169819390.33886108, 1.0, 1e-13);
    EXPECT_NEAR(m.v_pi / 153349194.19215077, 1.0, 1e-13);
    EXPECT_NEAR(m.p, 1.6839282463985716, 1e-13);
    EXPECT_NEAR(m.delta_t_s, -0.297662608846603, 1e-13);
}

TEST(SolveModes, SymmetricPairHasUnitP)
{
    const Lc lc = symmetric_lc();
    const ModeSolution<double> m = solve_modes(lc);
    EXPECT_NEAR(m.p, 1.0, 1e-12);
    EXPECT_NEAR(m.delta_t_s, 0.0, 1e-12);
    EXPECT_NEAR(m.R_c, -1.0, 1e-12);
    EXPECT_NEAR(m.R_pi, 1.0, 1e-12);

    // closed-form even and odd modes of a symmetric pair
    const double v_even = 1 / std::sqrt((lc.L(0, 0) + lc.L(0, 1)) * (lc.C(0, 0) + lc.C(0, 1)));
    const double v_odd = 1 / std::sqrt((lc.L(0, 0) - lc.L(0, 1)) * (lc.C(0, 0) - lc.C(0, 1)));
    EXPECT_NEAR(m.v_pi / v_even, 1.0, 1e-13);
    EXPECT_NEAR(m.v_c / v_odd, 1.0, 1e-13);
    EXPECT_NEAR(m.v_c / 172516389.83558854, 1.0, 1e-13);
    EXPECT_NEAR(m.v_pi / 155043418.23651055, 1.0, 1e-13);
}

TEST(SolveModes, PiModeNeverFaster)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-0.05, 0.05);
    for (int i = 0; i < 500; ++i)
    {
        const Lc lc = make_lc(400 * (1 + d(rng)), 120 * (1 + d(rng)), 120 * (1 + d(rng)), 400 * (1 + d(rng)),
                              100 * (1 + d(rng)), -20 * (1 + d(rng)), -20 * (1 + d(rng)), 100 * (1 + d(rng)));
        const auto m = solve_modes(lc);
        ASSERT_GE(m.gamma_coeff_pi, m.gamma_coeff_c);
        ASSERT_GT(m.p, 0.0);
    }
}

// L = [[400, 80], [80, 400]] nH/m with C = [[100, -20], [-20, 100]] pF/m gives
// L11 C12 + L12 C22 = 0: the product L*C is diagonal and the pair is
// electrically uncoupled even though both matrices have off-diagonal terms.
TEST(SolveModes, ProportionalCouplingIsDegenerate)
{
    EXPECT_ERRC(solve_modes(make_lc(400, 80, 80, 400, 100, -20, -20, 100)), Errc::UncoupledDegenerate);
}

TEST(SolveModes, UncoupledIdentityIsDegenerate)
{
    EXPECT_ERRC(solve_modes(make_lc(400, 0, 0, 400, 100, 0, 0, 100)), Errc::UncoupledDegenerate);
}

TEST(SolveModes, NonPropagatingRejected)
{
    EXPECT_ERRC(solve_modes(make_lc(400, 120, 120, 400, -100, 20, 20, -100)), Errc::NonPropagatingMode);
    // complex slowness: P12 P21 < 0 dominating
    EXPECT_ERRC(solve_modes(make_lc(400, 0, 0, 400, 100, 50, -50, 100)), Errc::NonPropagatingMode);
    Lc bad = symmetric_lc();
    bad.L(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_ERRC(solve_modes(bad), Errc::NonPropagatingMode);
}

TEST(SolveModes, ImpedancesMatchCurrentRelation)
{
    // For a mode with voltage vector V and slowness s the currents are s L^-1 V.
    for (const Lc &lc : {make_lc(400, 120, 120, 400, 100, -20, -20, 105), make_lc(420, 110, 110, 380, 95, -18, -18, 104)})
    {
        const auto m = solve_modes(lc);
        const Eigen::Matrix2d Linv = lc.L.inverse();
        const Eigen::Vector2d Vc(1.0, m.R_c), Vp(1.0, m.R_pi);
        const Eigen::Vector2d Ic = m.gamma_coeff_c * Linv * Vc, Ip = m.gamma_coeff_pi * Linv * Vp;
        EXPECT_NEAR(m.Z_c1 / (Vc[0] / Ic[0]), 1.0, 1e-12);
        EXPECT_NEAR(m.Z_c2 / (Vc[1] / Ic[1]), 1.0, 1e-12);
        EXPECT_NEAR(m.Z_pi1 / (Vp[0] / Ip[0]), 1.0, 1e-12);
        EXPECT_NEAR(m.Z_pi2 / (Vp[1] / Ip[1]), 1.0, 1e-12);
    }
}

TEST(CharacteristicResidual, RootsSatisfyPolynomial)
{
    for (const Lc &lc : {symmetric_lc(), make_lc(400, 120, 120, 400, 100, -20, -20, 105), make_lc(420, 120, 120, 400, 100, -20, -20, 100)})
    {
        const auto m = solve_modes(lc);
        EXPECT_LT(characteristic_residual(lc, m.gamma_coeff_c), 1e-10);
        EXPECT_LT(characteristic_residual(lc, m.gamma_coeff_pi), 1e-10);
        EXPECT_GT(characteristic_residual(lc, m.gamma_coeff_c * 1.01), 1e-4);
        EXPECT_GT(characteristic_residual(lc, m.gamma_coeff_pi * 1.01), 1e-4);
    }
}

TEST(CharacteristicResidual, EvenModeClosedForm)
{
    const Lc lc = symmetric_lc();
    const double s_even = std::sqrt((lc.L(0, 0) + lc.L(0, 1)) * (lc.C(0, 0) + lc.C(0, 1)));
    EXPECT_LT(characteristic_residual(lc, s_even), 1e-10);
}

TEST(Perturbation, ZeroForSymmetric)
{
    const auto pert = asymmetry_perturbation(symmetric_lc());
    EXPECT_NEAR(pert.delta_c_prime, 0.0, 1e-30);
    EXPECT_NEAR(pert.delta_c_doubleprime, 0.0, 1e-30);
    const auto m = solve_modes(symmetric_lc());
    EXPECT_EQ(estimate_delta_t_s(pert, m.v_c, m.v_pi), 0.0);
}

TEST(Perturbation, DegenerateVelocities)
{
    EXPECT_ERRC(estimate_delta_t_s(AsymmetryPerturbation<double>{1e-20, 0, 1, 1}, 1.5e8, 1.5e8), Errc::DegenerateVelocities);
}

TEST(Perturbation, SmallRegimeFlag)
{
    EXPECT_TRUE(asymmetry_perturbation(make_lc(400, 120, 120, 400, 100, -20, -20, 101)).within_small_regime());
    EXPECT_FALSE(asymmetry_perturbation(make_lc(400, 120, 120, 400, 140, -20, -20, 100)).within_small_regime());
}

// With only the diagonal of P perturbed (dc'' = 0), the estimate is exact to
// first order and the error falls off quadratically.
TEST(Perturbation, DiagonalOnlyConvergesQuadratically)
{
    std::vector<double> eps{1e-4, 1e-3, 1e-2}, err;
    for (double e : eps)
    {
        const Lc lc = make_lc(400, 0, 0, 400, 100 * (1 + e), -20, -20, 100);
        const auto pert = asymmetry_perturbation(lc);
        ASSERT_EQ(pert.delta_c_doubleprime, 0.0);
        const auto m = solve_modes(lc);
        err.push_back(std::abs(m.delta_t_s - estimate_delta_t_s(pert, m.v_c, m.v_pi)));
    }
    const double slope = std::log10(err[2] / err[0]) / std::log10(eps[2] / eps[0]);
    EXPECT_NEAR(slope, 2.0, 0.2);
}

TEST(DeriveSegment, SymmetricLineHasZeroTs)
{
    const Segment s = derive_segment(symmetric_lc(), 1.0);
    const auto m = solve_modes(symmetric_lc());
    EXPECT_NEAR(s.delta_tau, 1.0 / m.v_pi - 1.0 / m.v_c, 1e-24);
    EXPECT_NEAR(s.t_s, 0.0, 1e-24);
    ASSERT_TRUE(s.physical);
    EXPECT_EQ(s.physical->length, 1.0);
}

TEST(DeriveSegment, FrozenDeltaTau)
{
    const Segment s = derive_segment(make_lc(400, 120, 120, 400, 100, -20, -20, 105), 0.1);
    EXPECT_NEAR(s.delta_tau, 7.10096757622833e-11, 1e-24);
    EXPECT_NEAR(s.t_s, 0.20631179522359622 * s.delta_tau, 1e-24);
}

TEST(DeriveSegment, ExplicitPerturbationUsesEstimate)
{
    const Lc lc = make_lc(400, 0, 0, 400, 100.5, -20, -20, 100);
    const auto pert = asymmetry_perturbation(lc);
    const auto m = solve_modes(lc);
    const Segment s = derive_segment(lc, 1.0, std::optional(pert));
    EXPECT_NEAR(s.t_s / s.delta_tau, estimate_delta_t_s(pert, m.v_c, m.v_pi), 1e-12);
}

// Calibrated 1 m line with delta_tau near 66.2 ps and t_s near 6 ps.
TEST(DeriveSegment, MetreCableCalibration)
{
    const Lc lc = make_lc(400, 84.1, 84.1, 400, 100, -20, -20, 100.19);
    const Segment s = derive_segment(lc, 1.0);
    const auto m = solve_modes(lc);
    EXPECT_NEAR(s.delta_tau, 66.2 * ps, 2 * ps);
    EXPECT_NEAR(s.t_s, 6 * ps, 0.5 * ps);
    EXPECT_NEAR(s.delta_tau, 1.0 * (m.gamma_coeff_pi - m.gamma_coeff_c), 1e-24);
    EXPECT_NEAR(s.t_s, m.delta_t_s * s.delta_tau, 1e-24);
    EXPECT_NO_THROW(validate_segment(s));
}

TEST(DeriveSegment, NonPositiveLengthRejected)
{
    EXPECT_ERRC(derive_segment(symmetric_lc(), 0.0), Errc::NegativeLength);
    EXPECT_ERRC(derive_segment(symmetric_lc(), -1.0), Errc::NegativeLength);
}
