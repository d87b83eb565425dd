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

// Channel configuration documents.
//
// JSON, schema "ispg-channel/1". Every key is checked; unknown keys are an
// error. Times take a unit suffix (_ps or _s), frequencies _hz.
//
//   {
//     "schema": "ispg-channel/1",
//     "grid": {"start_hz": 1e7, "stop_hz": 7e10, "points": 7000, "spacing": "linear"},
//     "direction": "left_to_right",
//     "tolerance": 0.05,
//     "fit": {"delta_tau_hint_ps": 88},
//     "segments": [
//       {"kind": "LC", "t_l_ps": 0.5, "fit": ["t_l"]},
//       {"kind": "SC", "delta_tau_ps": 33.4, "t_s_ps": 3},
//       {"kind": "SC", "physical": {"length_m": 0.1,
//                                   "L_nH_per_m": [[400, 120], [120, 400]],
//                                   "C_pF_per_m": [[100, -20], [-20, 105]],
//                                   "t_l_prepend_ps": 0}}
//     ]
//   }
//
// "grid", "direction", "tolerance" and "fit" are optional. A physical SC
// segment may omit delta_tau/t_s (they are derived); when given they must
// agree with the derived values. parse_channel_config also accepts the DOT
// text produced by export_graph.

#pragma once

#include "fit.hpp"
#include "ispg.hpp"
#include "types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ispg
{

struct GridSpec
{
    double start_hz = 0;
    double stop_hz = 0;
    std::size_t points = 0;
    Spacing spacing = Spacing::linear;

    Grid build() const { return make_grid(start_hz, stop_hz, points, spacing); }
};

struct ChannelConfig
{
    IspgGraph<double> graph;
    std::optional<GridSpec> grid;
    std::optional<double> tolerance;      // fraction of peak-to-peak
    std::optional<double> delta_tau_hint; // s
    std::vector<FitUnknown> unknowns;
};

ChannelConfig parse_channel_config(std::string_view text);

// SI units throughout, so parse(write(c)) reproduces c exactly.
std::string write_channel_config(const ChannelConfig &config);

// "10MHz:70GHz:7000" or "1e7:7e10:7000:log". Bare numbers are Hz.
GridSpec parse_grid_arg(std::string_view text);

} // namespace ispg
