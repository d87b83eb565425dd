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

// Result tables and their CSV / JSON serializations.
//
// Tables use GHz and ps unless `si` is set, in which case Hz and s. Numbers
// are written with the shortest representation that reads back exactly and
// never depend on the C locale.

#pragma once

#include "types.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ispg
{

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

Table profile_table(const Profile &profile, bool si = false);

// Two profiles side by side: freq, skew21/skew12 of each, labelled by prefix.
Table comparison_table(const Profile &a, const Profile &b, const std::string &prefix_a, const std::string &prefix_b,
                       bool si = false);

Table delta_tau_table(const Grid &grid, const RealVector<double> &delta_tau, bool si = false);

Table resonance_table(const std::vector<double> &freqs_hz, bool si = false);

// Header row, comma separated, LF line ends.
std::string to_csv(const Table &table);

// {"meta": {...}, "columns": [...], "rows": [[...], ...]}
std::string to_json(const Table &table, const std::map<std::string, std::string> &meta = {});

// Reads what to_csv writes. Throws SyntaxError on malformed input.
Table parse_csv(std::string_view text);

// Shortest exact decimal form of v.
std::string format_number(double v);

} // namespace ispg
