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
#include <regex>

using namespace ispg;

namespace
{

IspgGraph<double> random_graph(std::mt19937_64 &rng)
{
    std::uniform_int_distribution<int> un(1, 12), coin(0, 1);
    std::uniform_real_distribution<double> ut(-5, 5), ud(1, 100);
    std::vector<Segment> nodes;
    const int n = un(rng);
    for (int i = 0; i < n; ++i)
        nodes.push_back(coin(rng) ? Segment::lc(ut(rng) * ps) : Segment::sc(ud(rng) * ps, ut(rng) * ps));
    return IspgGraph<double>(std::move(nodes));
}

// Printed four-term expression for the worked example.
double worked_example_formula(double f)
{
    const double pi = pi_v<double>, a = 33.4 * ps, b = 66.2 * ps;
    return 0.5 * ps * std::cos(2 * pi * f * (a + b)) + 3 * ps * sinc(pi * f * a) * std::cos(pi * f * (a + 2 * b)) +
           1 * ps * std::cos(2 * pi * f * b) + 6 * ps * sinc(pi * f * b) * std::cos(pi * f * b);
}

} // namespace

TEST(Graph, NeedsAtLeastOneNode)
{
    EXPECT_ERRC(IspgGraph<double>(std::vector<Segment>{}), Errc::InvalidSegment);
}

TEST(CounterSweep, SingleLcIsFlat)
{
    const IspgGraph<double> g({Segment::lc(1.7 * ps)});
    for (double f : {1e6, 1e9, 5e10, 1e11})
        EXPECT_EQ(counter_sweep(g, f).total_skew, 1.7 * ps);
}

TEST(CounterSweep, WorkedExampleLowFrequency)
{
    EXPECT_NEAR(counter_sweep(worked_example(), 1e3).total_skew, 10.5 * ps, 1e-6 * ps);
}

TEST(CounterSweep, WorkedExampleMatchesPrintedExpression)
{
    for (double f = 10 * MHz; f <= 100 * GHz; f += 97 * MHz)
        ASSERT_NEAR(counter_sweep(worked_example(), f).total_skew, worked_example_formula(f), 1e-12 * ps);
}

TEST(CounterSweep, TraceFollowsSweepRule)
{
    const double f = 12.3 * GHz;
    const auto r = counter_sweep(worked_example(), f);
    ASSERT_EQ(r.trace.size(), 4u);
    // right to left: node 4, 3, 2, 1
    EXPECT_EQ(r.trace[0].node, 3u);
    EXPECT_EQ(r.trace[3].node, 0u);
    double sum = 0;
    for (const auto &s : r.trace)
    {
        if (s.kind == SegmentKind::LC)
            EXPECT_EQ(s.phase_after, s.phase_before);
        else
            EXPECT_NEAR(s.phase_after - s.phase_before,
                        2 * pi_v<double> * f * worked_example().nodes[s.node].delta_tau, 1e-12);
        sum += s.contribution;
    }
    EXPECT_EQ(r.trace[0].phase_before, 0.0);
    EXPECT_NEAR(sum, r.total_skew, 1e-30);
    EXPECT_NEAR(r.trace[1].contribution, 1 * ps * std::cos(2 * pi_v<double> * f * 66.2 * ps), 1e-12 * ps);
}

TEST(CounterSweep, PrependedDelayActsAsLcOnTheLeft)
{
    Segment sc = derive_segment(symmetric_lc(), 0.05);
    sc.physical->t_l_prepend = 2 * ps;
    const IspgGraph<double> a({sc});
    Segment plain = sc;
    plain.physical.reset();
    const IspgGraph<double> b({Segment::lc(2 * ps), plain});
    for (double f : {1e8, 3e9, 2.2e10})
        EXPECT_EQ(counter_sweep(a, f).total_skew, counter_sweep(b, f).total_skew);
}

TEST(DirectSum, AgreesWithSweepOnRandomGraphs)
{
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> uf(1e7, 1e11);
    double worst = 0;
    for (int i = 0; i < 300; ++i)
    {
        const auto g = random_graph(rng);
        for (int j = 0; j < 20; ++j)
        {
            const double f = uf(rng);
            worst = std::max(worst, std::abs(counter_sweep(g, f).total_skew - total_skew_direct(g, f)));
        }
    }
    EXPECT_LE(worst, 1e-15);
}

TEST(DirectSum, AllLcIsSum)
{
    const IspgGraph<double> g({Segment::lc(1 * ps), Segment::lc(-0.25 * ps), Segment::lc(2 * ps)});
    EXPECT_NEAR(total_skew_direct(g, 40 * GHz), 2.75 * ps, 1e-12 * ps);
}

TEST(DirectSum, MeasurementFormula)
{
    // LC(1) -> SC(88, 5) -> LC(0.8): t_l,1 = 0.8 at the observation end
    const IspgGraph<double> g({Segment::lc(1 * ps), Segment::sc(88 * ps, 5 * ps), Segment::lc(0.8 * ps)});
    for (double f = 10 * MHz; f <= 70 * GHz; f += 313 * MHz)
    {
        const double x = pi_v<double> * f * 88 * ps;
        const double expected = 0.8 * ps + 5 * ps * sinc(x) * std::cos(x) + 1 * ps * std::cos(2 * x);
        ASSERT_NEAR(total_skew_direct(g, f), expected, 1e-12 * ps);
    }
}

TEST(Profile, DelayThenScOffsetsAndModulates)
{
    const IspgGraph<double> g({Segment::lc(3 * ps), Segment::sc(66.2 * ps, 6 * ps)});
    const Grid grid = make_grid(10 * MHz, 70 * GHz, 701);
    const Profile p = evaluate_profile(g, grid);
    const Profile cf = closed_form_skew(3 * ps, 66.2 * ps, 6 * ps, grid);
    for (Eigen::Index k = 0; k < p.skew_21.size(); ++k)
    {
        ASSERT_NEAR(p.skew_21[k], cf.skew_21[k], 1e-26);
        ASSERT_NEAR(p.skew_12[k], cf.skew_12[k], 1e-26);
    }
}

TEST(Profile, SingleScIsReciprocal)
{
    const IspgGraph<double> g({Segment::sc(33.4 * ps, 3 * ps)});
    const Profile p = evaluate_profile(g, make_grid(10 * MHz, 100 * GHz, 500));
    EXPECT_EQ(p.skew_21, p.skew_12);
}

TEST(Profile, StriplineInsertionAddsHalfPhaseCosine)
{
    // splitting SC(88, 5) in two halves around a stripline LC
    const Grid grid = make_grid(10 * MHz, 70 * GHz, 701);
    for (double tsl : {1 * ps, 2 * ps})
    {
        const IspgGraph<double> base({Segment::lc(1 * ps), Segment::sc(88 * ps, 5 * ps), Segment::lc(0.8 * ps)});
        const IspgGraph<double> ext({Segment::lc(1 * ps), Segment::sc(44 * ps, 2.5 * ps), Segment::lc(tsl),
                                     Segment::sc(44 * ps, 2.5 * ps), Segment::lc(0.8 * ps)});
        const Profile a = evaluate_profile(base, grid), b = evaluate_profile(ext, grid);
        for (std::size_t k = 0; k < grid.size(); ++k)
        {
            const auto i = static_cast<Eigen::Index>(k);
            ASSERT_NEAR(b.skew_21[i] - a.skew_21[i], tsl * std::cos(pi_v<double> * grid[k] * 88 * ps), 1e-26);
        }
    }
}

TEST(Profile, ReversingDirectionSwapsProfiles)
{
    std::mt19937_64 rng(99);
    const Grid grid = make_grid(10 * MHz, 50 * GHz, 97);
    for (int i = 0; i < 50; ++i)
    {
        const auto g = random_graph(rng);
        const Profile a = evaluate_profile(g, grid), b = evaluate_profile(g.flipped(), grid),
                      c = evaluate_profile(g.reversed(), grid);
        ASSERT_EQ(a.skew_21, b.skew_12);
        ASSERT_EQ(a.skew_12, b.skew_21);
        ASSERT_EQ(a.skew_21, c.skew_12);
    }
}

TEST(Profile, ZeroDelayLcIsNeutral)
{
    std::mt19937_64 rng(4);
    const Grid grid = make_grid(10 * MHz, 50 * GHz, 97);
    for (int i = 0; i < 50; ++i)
    {
        const auto g = random_graph(rng);
        for (std::size_t pos = 0; pos <= g.nodes.size(); ++pos)
        {
            auto h = g;
            h.nodes.insert(h.nodes.begin() + static_cast<long>(pos), Segment::lc(0.0));
            const Profile a = evaluate_profile(g, grid), b = evaluate_profile(h, grid);
            ASSERT_EQ(a.skew_21, b.skew_21);
            ASSERT_EQ(a.skew_12, b.skew_12);
        }
    }
}

TEST(Profile, LowFrequencyLimitIsTotalDelay)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i)
    {
        const auto g = random_graph(rng);
        double total = 0, dmax = 0;
        for (const auto &n : g.nodes)
            total += n.t_l + n.t_s, dmax = std::max(dmax, std::abs(n.delta_tau));
        const Grid grid(std::vector<double>{0.5e-3 / (dmax > 0 ? dmax : 1e-12)});
        const Profile p = evaluate_profile(g, grid);
        double scale = 0;
        for (const auto &n : g.nodes)
            scale += std::abs(n.t_l) + std::abs(n.t_s);
        ASSERT_NEAR(p.skew_21[0], total, 1e-3 * scale);
        ASSERT_NEAR(p.skew_12[0], total, 1e-3 * scale);
    }
}

TEST(ExportGraph, SingleLcIsOneBox)
{
    const std::string dot = export_graph(IspgGraph<double>({Segment::lc(1 * ps)}));
    EXPECT_NE(dot.find("shape=box"), std::string::npos);
    EXPECT_EQ(dot.find("shape=circle"), std::string::npos);
    EXPECT_EQ(dot.find("->"), std::string::npos);
}

TEST(ExportGraph, WorkedExampleTopology)
{
    const std::string dot = export_graph(worked_example());
    const auto count = [&](const std::string &re) {
        const std::regex r(re);
        return std::distance(std::sregex_iterator(dot.begin(), dot.end(), r), std::sregex_iterator());
    };
    EXPECT_EQ(count("shape=box"), 2);
    EXPECT_EQ(count("shape=circle"), 2);
    EXPECT_EQ(count("style=solid"), 3);
    EXPECT_EQ(count("style=dashed"), 1);
    EXPECT_NE(dot.find("n4 -> n1 [style=dashed"), std::string::npos);
    EXPECT_EQ(dot.rfind("digraph", 0), 0u);
}
