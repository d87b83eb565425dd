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

// Intra-pair skew propagation graph.
//
// A channel is an ordered list of LC and SC nodes, indexed left to right. For a
// signal travelling left to right the skew observed at the right end is
// accumulated by a counter sweep starting at the right end:
//
//      phi = 0, S = 0
//      SC(dtau, t_s):  S += t_s sinc(pi f dtau) cos(phi + pi f dtau);  phi += 2 pi f dtau
//      LC(t_l):        S += t_l cos(phi)
//
// The same value follows from the closed double sum implemented by
// total_skew_direct. The reverse direction (skew_12) is the sweep of the
// reversed node order.
//
// A physical SC node with t_l_prepend != 0 behaves as an LC node placed
// directly to its left.

#pragma once

#include "types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace ispg
{

enum class Direction
{
    left_to_right,
    right_to_left
};

template <typename Scalar>
struct IspgGraph
{
    std::vector<SegmentSpec<Scalar>> nodes; // physical order, left to right
    Direction direction = Direction::left_to_right;

    IspgGraph() = default;
    explicit IspgGraph(std::vector<SegmentSpec<Scalar>> n, Direction d = Direction::left_to_right)
        : nodes(std::move(n)), direction(d)
    {
        if (nodes.empty())
            throw Error(Errc::InvalidSegment, "a graph needs at least one node");
    }

    // Same nodes, opposite signal direction.
    IspgGraph flipped() const
    {
        IspgGraph g = *this;
        g.direction = direction == Direction::left_to_right ? Direction::right_to_left : Direction::left_to_right;
        return g;
    }

    // Reversed node order, same direction.
    IspgGraph reversed() const
    {
        IspgGraph g = *this;
        std::reverse(g.nodes.begin(), g.nodes.end());
        return g;
    }
};

template <typename Scalar>
struct SweepStep
{
    std::size_t node = 0; // 0-based index into graph.nodes
    SegmentKind kind = SegmentKind::LC;
    Scalar phase_before = 0;
    Scalar contribution = 0;
    Scalar phase_after = 0;
};

template <typename Scalar>
using SweepTrace = std::vector<SweepStep<Scalar>>;

template <typename Scalar>
struct SweepResult
{
    Scalar total_skew = 0;
    SweepTrace<Scalar> trace;
};

namespace detail
{

template <typename Scalar>
struct Stage
{
    std::size_t node;
    SegmentKind kind;
    Scalar t;         // t_l for LC, t_s for SC
    Scalar delta_tau; // SC only
};

// Stages in signal order: first stage is where the signal enters.
template <typename Scalar>
std::vector<Stage<Scalar>> signal_order_stages(const IspgGraph<Scalar> &g)
{
    if (g.nodes.empty())
        throw Error(Errc::InvalidSegment, "a graph needs at least one node");
    std::vector<Stage<Scalar>> st;
    st.reserve(g.nodes.size() + 2);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
    {
        const auto &n = g.nodes[i];
        if (n.is_lc())
            st.push_back({i, SegmentKind::LC, n.t_l, Scalar(0)});
        else
        {
            if (n.physical && n.physical->t_l_prepend != Scalar(0))
                st.push_back({i, SegmentKind::LC, n.physical->t_l_prepend, Scalar(0)});
            st.push_back({i, SegmentKind::SC, n.t_s, n.delta_tau});
        }
    }
    if (g.direction == Direction::right_to_left)
        std::reverse(st.begin(), st.end());
    return st;
}

} // namespace detail

template <typename Scalar>
SweepResult<Scalar> counter_sweep(const IspgGraph<Scalar> &graph, Scalar f)
{
    using std::cos;
    const auto stages = detail::signal_order_stages(graph);
    const Scalar pi = pi_v<Scalar>;

    SweepResult<Scalar> res;
    res.trace.reserve(stages.size());
    Scalar phi = 0;
    Scalar S = 0;
    for (auto it = stages.rbegin(); it != stages.rend(); ++it)
    {
        SweepStep<Scalar> step;
        step.node = it->node;
        step.kind = it->kind;
        step.phase_before = phi;
        if (it->kind == SegmentKind::SC)
        {
            const Scalar half = pi * f * it->delta_tau;
            step.contribution = it->t * sinc(half) * cos(phi + half);
            phi += Scalar(2) * pi * f * it->delta_tau;
        }
        else
            step.contribution = it->t * cos(phi);
        S += step.contribution;
        step.phase_after = phi;
        res.trace.push_back(step);
    }
    res.total_skew = S;
    return res;
}

// Closed form:
//   S = sum_i [ t_l,i cos(Theta_{N-i+1}) + t_s,i sinc(pi f dtau_i) cos(Theta_{N-i} + pi f dtau_i) ]
// with theta_k = 0 for LC and 2 pi f dtau_k for SC, and Theta_m the sum of the
// m right-most theta (Theta_0 = 0).
template <typename Scalar>
Scalar total_skew_direct(const IspgGraph<Scalar> &graph, Scalar f)
{
    using std::cos;
    const auto stages = detail::signal_order_stages(graph);
    const std::size_t N = stages.size();
    const Scalar pi = pi_v<Scalar>;

    std::vector<Scalar> theta(N + 1, Scalar(0)); // 1-based
    for (std::size_t k = 1; k <= N; ++k)
        if (stages[k - 1].kind == SegmentKind::SC)
            theta[k] = Scalar(2) * pi * f * stages[k - 1].delta_tau;

    const auto big_theta = [&](std::size_t m) {
        Scalar acc = 0;
        for (std::size_t k = N - m + 1; k <= N; ++k)
            acc += theta[k];
        return acc;
    };

    Scalar S = 0;
    for (std::size_t i = 1; i <= N; ++i)
    {
        const auto &s = stages[i - 1];
        if (s.kind == SegmentKind::LC)
            S += s.t * cos(big_theta(N - i + 1));
        else
        {
            const Scalar half = pi * f * s.delta_tau;
            S += s.t * sinc(half) * cos(big_theta(N - i) + half);
        }
    }
    return S;
}

// skew_21 sweeps the graph in its own direction, skew_12 in the opposite one.
template <typename Scalar>
SkewProfile<Scalar> evaluate_profile(const IspgGraph<Scalar> &graph, const FrequencyGrid<Scalar> &grid,
                                     const ExecPolicy &policy = {})
{
    const IspgGraph<Scalar> back = graph.flipped();
    SkewProfile<Scalar> out;
    out.grid = grid;
    out.skew_21.resize(static_cast<Eigen::Index>(grid.size()));
    out.skew_12.resize(static_cast<Eigen::Index>(grid.size()));
    detail::parallel_for(grid.size(), policy, [&](std::size_t k) {
        out.skew_21[static_cast<Eigen::Index>(k)] = counter_sweep(graph, grid[k]).total_skew;
        out.skew_12[static_cast<Eigen::Index>(k)] = counter_sweep(back, grid[k]).total_skew;
    });
    return out;
}

namespace detail
{

inline std::string exact_number(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

inline std::string ps_label(double seconds)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g ps", seconds * 1e12);
    return buf;
}

} // namespace detail

// Graphviz DOT. LC nodes are boxes labelled t_l, SC nodes circles labelled
// (delta_tau, t_s); solid edges follow the signal, the dashed red edge is the
// evaluation sweep. Machine-readable attributes carry exact SI values so the
// document can be read back by parse_channel_config.
template <typename Scalar>
std::string export_graph(const IspgGraph<Scalar> &graph)
{
    using detail::exact_number;
    using detail::ps_label;
    const std::size_t n = graph.nodes.size();
    const bool ltr = graph.direction == Direction::left_to_right;

    std::string out = "digraph ispg {\n";
    out += "  rankdir=LR;\n";
    out += std::string("  ispg_direction=\"") + (ltr ? "left_to_right" : "right_to_left") + "\";\n";
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto &s = graph.nodes[i];
        const std::string id = "n" + std::to_string(i + 1);
        if (s.is_lc())
        {
            out += "  " + id + " [shape=box, kind=\"LC\", label=\"t_l = " + ps_label(double(s.t_l)) + "\", t_l=\"" +
                   exact_number(double(s.t_l)) + "\"];\n";
            continue;
        }
        out += "  " + id + " [shape=circle, kind=\"SC\", label=\"dtau = " + ps_label(double(s.delta_tau)) +
               "\\nt_s = " + ps_label(double(s.t_s)) + "\", delta_tau=\"" + exact_number(double(s.delta_tau)) +
               "\", t_s=\"" + exact_number(double(s.t_s)) + "\"";
        if (s.physical)
        {
            const auto &ph = *s.physical;
            auto mat = [](const Eigen::Matrix<Scalar, 2, 2> &m) {
                return exact_number(double(m(0, 0))) + " " + exact_number(double(m(0, 1))) + " " +
                       exact_number(double(m(1, 0))) + " " + exact_number(double(m(1, 1)));
            };
            out += ", length_m=\"" + exact_number(double(ph.length)) + "\", L_H_per_m=\"" + mat(ph.lc.L) +
                   "\", C_F_per_m=\"" + mat(ph.lc.C) + "\", t_l_prepend=\"" + exact_number(double(ph.t_l_prepend)) +
                   "\"";
        }
        out += "];\n";
    }
    for (std::size_t i = 1; i < n; ++i)
    {
        const std::string a = "n" + std::to_string(i), b = "n" + std::to_string(i + 1);
        out += "  " + (ltr ? a + " -> " + b : b + " -> " + a) + " [style=solid, color=black];\n";
    }
    if (n > 1)
    {
        const std::string first = "n1", last = "n" + std::to_string(n);
        out += "  " + (ltr ? last + " -> " + first : first + " -> " + last) +
               " [style=dashed, color=red, constraint=false, label=\"evaluation sweep\"];\n";
    }
    out += "}\n";
    return out;
}

} // namespace ispg
