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

#include "ispg/table.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>

namespace ispg
{

namespace
{

const char *freq_col(bool si) { return si ? "freq_hz" : "freq_ghz"; }
double freq_val(double f, bool si) { return si ? f : f * 1e-9; }
double time_val(double t, bool si) { return si ? t : t * 1e12; }
std::string time_col(const std::string &name, bool si) { return name + (si ? "_s" : "_ps"); }

} // namespace

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

Table profile_table(const Profile &profile, bool si)
{
    Table t;
    t.columns = {freq_col(si), time_col("skew21", si), time_col("skew12", si)};
    t.rows.reserve(profile.grid.size());
    for (std::size_t k = 0; k < profile.grid.size(); ++k)
    {
        const auto i = static_cast<Eigen::Index>(k);
        t.rows.push_back({freq_val(profile.grid[k], si), time_val(profile.skew_21[i], si), time_val(profile.skew_12[i], si)});
    }
    return t;
}

Table comparison_table(const Profile &a, const Profile &b, const std::string &prefix_a, const std::string &prefix_b,
                       bool si)
{
    if (!(a.grid == b.grid))
        throw Error(Errc::GridMismatch, "profiles are on different grids");
    Table t;
    t.columns = {freq_col(si), time_col(prefix_a + "_skew21", si), time_col(prefix_a + "_skew12", si),
                 time_col(prefix_b + "_skew21", si), time_col(prefix_b + "_skew12", si)};
    for (std::size_t k = 0; k < a.grid.size(); ++k)
    {
        const auto i = static_cast<Eigen::Index>(k);
        t.rows.push_back({freq_val(a.grid[k], si), time_val(a.skew_21[i], si), time_val(a.skew_12[i], si),
                          time_val(b.skew_21[i], si), time_val(b.skew_12[i], si)});
    }
    return t;
}

Table delta_tau_table(const Grid &grid, const RealVector<double> &delta_tau, bool si)
{
    if (static_cast<std::size_t>(delta_tau.size()) != grid.size())
        throw Error(Errc::GridMismatch, "delta_tau series does not match the grid");
    Table t;
    t.columns = {freq_col(si), time_col("delta_tau", si)};
    for (std::size_t k = 0; k < grid.size(); ++k)
        t.rows.push_back({freq_val(grid[k], si), time_val(delta_tau[static_cast<Eigen::Index>(k)], si)});
    return t;
}

Table resonance_table(const std::vector<double> &freqs_hz, bool si)
{
    Table t;
    t.columns = {"n", freq_col(si)};
    for (std::size_t k = 0; k < freqs_hz.size(); ++k)
        t.rows.push_back({double(k + 1), freq_val(freqs_hz[k], si)});
    return t;
}

std::string to_csv(const Table &table)
{
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out += (c ? "," : "") + table.columns[c];
    out += '\n';
    for (const auto &row : table.rows)
    {
        for (std::size_t c = 0; c < row.size(); ++c)
        {
            if (c)
                out += ',';
            out += format_number(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table &table, const std::map<std::string, std::string> &meta)
{
    nlohmann::ordered_json j;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto &[k, v] : meta)
        j["meta"][k] = v;
    j["columns"] = table.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto &row : table.rows)
    {
        auto r = nlohmann::ordered_json::array();
        for (double v : row)
            r.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr));
        j["rows"].push_back(std::move(r));
    }
    return j.dump(1) + "\n";
}

Table parse_csv(std::string_view text)
{
    Table t;
    std::size_t pos = 0, line_no = 0;
    bool header = true;
    while (pos < text.size())
    {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;

        std::vector<std::string_view> fields;
        std::size_t i = 0;
        while (true)
        {
            const std::size_t j = line.find(',', i);
            fields.push_back(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
            if (j == std::string_view::npos)
                break;
            i = j + 1;
        }
        if (header)
        {
            for (auto f : fields)
                t.columns.emplace_back(f);
            header = false;
            continue;
        }
        if (fields.size() != t.columns.size())
            throw Error(Errc::SyntaxError, "csv line " + std::to_string(line_no) + " has the wrong number of fields");
        std::vector<double> row;
        for (auto f : fields)
        {
            double v = 0;
            const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
            if (r.ec != std::errc() || r.ptr != f.data() + f.size())
                throw Error(Errc::SyntaxError, "csv line " + std::to_string(line_no) + ": bad number");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace ispg
