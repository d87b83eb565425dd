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

#include "ispg/config.hpp"
#include "ispg/mode_solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <regex>
#include <set>

namespace ispg
{

namespace
{

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr const char *schema_id = "ispg-channel/1";

[[noreturn]] void fail(const std::string &what)
{
    throw Error(Errc::ConfigError, what);
}

void check_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where)
{
    if (!obj.is_object())
        fail(where + " must be an object");
    for (const auto &[k, v] : obj.items())
        if (!allowed.count(k))
            fail("unknown key '" + k + "' in " + where);
}

double number(const json &v, const std::string &what)
{
    if (!v.is_number())
        fail(what + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        fail(what + " must be finite");
    return d;
}

// Reads base_ps or base_s, in seconds.
std::optional<double> time_field(const json &obj, const std::string &base, const std::string &where)
{
    const bool ps = obj.contains(base + "_ps"), s = obj.contains(base + "_s");
    if (ps && s)
        fail(where + ": give either " + base + "_ps or " + base + "_s, not both");
    if (ps)
        return number(obj.at(base + "_ps"), where + "." + base + "_ps") * 1e-12;
    if (s)
        return number(obj.at(base + "_s"), where + "." + base + "_s");
    return std::nullopt;
}

Eigen::Matrix2d matrix_field(const json &obj, const std::string &si_key, const std::string &scaled_key, double scale,
                             const std::string &where)
{
    const bool a = obj.contains(si_key), b = obj.contains(scaled_key);
    if (a == b)
        fail(where + ": exactly one of " + si_key + " and " + scaled_key + " is required");
    const json &m = obj.at(a ? si_key : scaled_key);
    const double f = a ? 1.0 : scale;
    if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() || m[0].size() != 2 || m[1].size() != 2)
        fail(where + ": matrices are written [[a, b], [c, d]]");
    Eigen::Matrix2d out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = number(m[i][j], where) * f;
    return out;
}

FitField fit_field(const std::string &name, const std::string &where)
{
    if (name == "t_l")
        return FitField::t_l;
    if (name == "delta_tau")
        return FitField::delta_tau;
    if (name == "t_s")
        return FitField::t_s;
    fail(where + ": unknown fit field '" + name + "'");
}

Segment parse_segment(const json &j, std::size_t index, std::vector<FitUnknown> &unknowns)
{
    const std::string where = "segments[" + std::to_string(index) + "]";
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        fail(where + ": every segment needs a string \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();

    Segment seg;
    if (kind == "LC")
    {
        check_keys(j, {"kind", "t_l_ps", "t_l_s", "fit"}, where);
        const auto t = time_field(j, "t_l", where);
        if (!t)
            fail(where + ": LC segments need t_l_ps or t_l_s");
        seg = Segment::lc(*t);
    }
    else if (kind == "SC")
    {
        check_keys(j, {"kind", "delta_tau_ps", "delta_tau_s", "t_s_ps", "t_s_s", "physical", "fit"}, where);
        const auto dt = time_field(j, "delta_tau", where);
        const auto ts = time_field(j, "t_s", where);
        if (j.contains("physical"))
        {
            const json &ph = j.at("physical");
            const std::string pw = where + ".physical";
            check_keys(ph, {"length_m", "L_H_per_m", "L_nH_per_m", "C_F_per_m", "C_pF_per_m", "t_l_prepend_ps", "t_l_prepend_s"}, pw);
            if (!ph.contains("length_m"))
                fail(pw + ": length_m is required");
            Lc lc;
            lc.L = matrix_field(ph, "L_H_per_m", "L_nH_per_m", 1e-9, pw);
            lc.C = matrix_field(ph, "C_F_per_m", "C_pF_per_m", 1e-12, pw);
            seg = derive_segment(lc, number(ph.at("length_m"), pw + ".length_m"));
            seg.physical->t_l_prepend = time_field(ph, "t_l_prepend", pw).value_or(0.0);
            if ((dt && std::abs(*dt - seg.delta_tau) > 1e-15) || (ts && std::abs(*ts - seg.t_s) > 1e-15))
                throw Error(Errc::InconsistentPhysicalParams,
                            where + ": delta_tau/t_s disagree with values derived from the physical block");
        }
        else
        {
            if (!dt || !ts)
                fail(where + ": SC segments need delta_tau and t_s (or a physical block)");
            seg = Segment::sc(*dt, *ts);
        }
    }
    else
        fail(where + ": kind must be \"LC\" or \"SC\", got \"" + kind + "\"");

    bool fit_delta_tau = false;
    if (j.contains("fit"))
    {
        const json &f = j.at("fit");
        if (!f.is_array())
            fail(where + ".fit must be a list of field names");
        for (const auto &name : f)
        {
            if (!name.is_string())
                fail(where + ".fit must be a list of field names");
            const FitField field = fit_field(name.get<std::string>(), where);
            if ((field == FitField::t_l) != seg.is_lc())
                fail(where + ": '" + name.get<std::string>() + "' is not a field of a " + (seg.is_lc() ? "LC" : "SC") + " segment");
            fit_delta_tau = fit_delta_tau || field == FitField::delta_tau;
            unknowns.push_back({index, field});
        }
    }
    // a fitted delta_tau of 0 means "start from the hint"
    if (!(fit_delta_tau && seg.delta_tau == 0.0))
        validate_segment(seg);
    return seg;
}

ChannelConfig parse_json_config(std::string_view text)
{
    json root;
    try
    {
        root = json::parse(text.begin(), text.end());
    }
    catch (const json::exception &e)
    {
        fail(std::string("invalid JSON: ") + e.what());
    }
    check_keys(root, {"schema", "grid", "direction", "tolerance", "fit", "segments"}, "config");
    if (!root.contains("schema") || !root.at("schema").is_string())
        fail("config: \"schema\" is required");
    if (root.at("schema").get<std::string>() != schema_id)
        fail("config: unsupported schema '" + root.at("schema").get<std::string>() + "', expected " + schema_id);

    ChannelConfig cfg;
    if (root.contains("grid"))
    {
        const json &g = root.at("grid");
        check_keys(g, {"start_hz", "stop_hz", "points", "spacing"}, "grid");
        if (!g.contains("start_hz") || !g.contains("stop_hz") || !g.contains("points"))
            fail("grid: start_hz, stop_hz and points are required");
        GridSpec gs;
        gs.start_hz = number(g.at("start_hz"), "grid.start_hz");
        gs.stop_hz = number(g.at("stop_hz"), "grid.stop_hz");
        if (!g.at("points").is_number_unsigned())
            fail("grid.points must be a positive integer");
        gs.points = g.at("points").get<std::size_t>();
        if (g.contains("spacing"))
        {
            const json &s = g.at("spacing");
            if (s == "linear")
                gs.spacing = Spacing::linear;
            else if (s == "log")
                gs.spacing = Spacing::log;
            else
                fail("grid.spacing must be \"linear\" or \"log\"");
        }
        gs.build(); // validates
        cfg.grid = gs;
    }

    Direction dir = Direction::left_to_right;
    if (root.contains("direction"))
    {
        const json &d = root.at("direction");
        if (d == "left_to_right")
            dir = Direction::left_to_right;
        else if (d == "right_to_left")
            dir = Direction::right_to_left;
        else
            fail("direction must be \"left_to_right\" or \"right_to_left\"");
    }

    if (root.contains("tolerance"))
    {
        cfg.tolerance = number(root.at("tolerance"), "tolerance");
        if (!(*cfg.tolerance > 0))
            fail("tolerance must be positive");
    }

    if (root.contains("fit"))
    {
        const json &f = root.at("fit");
        check_keys(f, {"delta_tau_hint_ps", "delta_tau_hint_s"}, "fit");
        cfg.delta_tau_hint = time_field(f, "delta_tau_hint", "fit");
    }

    if (!root.contains("segments") || !root.at("segments").is_array() || root.at("segments").empty())
        fail("config: \"segments\" must be a non-empty list");
    std::vector<Segment> nodes;
    const json &segs = root.at("segments");
    for (std::size_t i = 0; i < segs.size(); ++i)
        nodes.push_back(parse_segment(segs[i], i, cfg.unknowns));
    cfg.graph = IspgGraph<double>(std::move(nodes), dir);
    return cfg;
}

double parse_double(const std::string &s, const std::string &what)
{
    double v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        fail(what + ": '" + s + "' is not a number");
    return v;
}

Eigen::Matrix2d parse_matrix_attr(const std::string &s, const std::string &what)
{
    std::vector<double> v;
    std::size_t i = 0;
    while (i < s.size())
    {
        while (i < s.size() && s[i] == ' ')
            ++i;
        std::size_t j = s.find(' ', i);
        if (j == std::string::npos)
            j = s.size();
        if (j > i)
            v.push_back(parse_double(s.substr(i, j - i), what));
        i = j;
    }
    if (v.size() != 4)
        fail(what + ": expected four matrix entries");
    Eigen::Matrix2d m;
    m << v[0], v[1], v[2], v[3];
    return m;
}

ChannelConfig parse_dot_config(std::string_view text)
{
    static const std::regex node_re(R"(^\s*n(\d+)\s*\[(.*)\]\s*;?\s*$)");
    static const std::regex attr_re(R"re((\w+)\s*=\s*"([^"]*)")re");
    static const std::regex dir_re(R"re(^\s*ispg_direction\s*=\s*"(\w+)"\s*;?\s*$)re");

    ChannelConfig cfg;
    Direction dir = Direction::left_to_right;
    std::map<std::size_t, Segment> nodes;

    std::size_t pos = 0;
    while (pos < text.size())
    {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        const std::string line(text.substr(pos, nl - pos));
        pos = nl + 1;

        std::smatch m;
        if (std::regex_match(line, m, dir_re))
        {
            if (m[1] == "left_to_right")
                dir = Direction::left_to_right;
            else if (m[1] == "right_to_left")
                dir = Direction::right_to_left;
            else
                fail("graph: unknown direction '" + m[1].str() + "'");
            continue;
        }
        if (line.find("->") != std::string::npos || !std::regex_match(line, m, node_re))
            continue;

        const std::size_t id = std::stoul(m[1].str());
        const std::string body = m[2].str();
        std::map<std::string, std::string> attrs;
        for (auto it = std::sregex_iterator(body.begin(), body.end(), attr_re); it != std::sregex_iterator(); ++it)
            attrs[(*it)[1].str()] = (*it)[2].str();

        const std::string where = "graph node n" + std::to_string(id);
        auto need = [&](const std::string &key) -> const std::string & {
            const auto it = attrs.find(key);
            if (it == attrs.end())
                fail(where + ": missing attribute " + key);
            return it->second;
        };

        Segment seg;
        const std::string kind = need("kind");
        if (kind == "LC")
            seg = Segment::lc(parse_double(need("t_l"), where));
        else if (kind == "SC")
        {
            seg = Segment::sc(parse_double(need("delta_tau"), where), parse_double(need("t_s"), where));
            if (attrs.count("length_m"))
            {
                PhysicalSegment<double> ph;
                ph.length = parse_double(need("length_m"), where);
                ph.lc.L = parse_matrix_attr(need("L_H_per_m"), where);
                ph.lc.C = parse_matrix_attr(need("C_F_per_m"), where);
                ph.t_l_prepend = attrs.count("t_l_prepend") ? parse_double(attrs["t_l_prepend"], where) : 0.0;
                seg.physical = ph;
            }
        }
        else
            fail(where + ": unknown kind '" + kind + "'");
        validate_segment(seg);
        if (!nodes.emplace(id, seg).second)
            fail(where + " appears twice");
    }

    if (nodes.empty())
        fail("graph: no nodes");
    std::vector<Segment> list;
    std::size_t expect = 1;
    for (auto &[id, seg] : nodes)
    {
        if (id != expect++)
            fail("graph: node ids must run n1..nN without gaps");
        list.push_back(seg);
    }
    cfg.graph = IspgGraph<double>(std::move(list), dir);
    return cfg;
}

ojson matrix_json(const Eigen::Matrix2d &m)
{
    return ojson::array({ojson::array({m(0, 0), m(0, 1)}), ojson::array({m(1, 0), m(1, 1)})});
}

double parse_freq_token(std::string_view tok)
{
    std::string s(tok);
    std::string lower;
    for (char c : s)
        lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    double scale = 1.0;
    for (const auto &[suffix, f] : std::initializer_list<std::pair<const char *, double>>{
             {"ghz", 1e9}, {"mhz", 1e6}, {"khz", 1e3}, {"hz", 1.0}})
    {
        const std::string suf(suffix);
        if (lower.size() > suf.size() && lower.compare(lower.size() - suf.size(), suf.size(), suf) == 0)
        {
            scale = f;
            s.resize(s.size() - suf.size());
            break;
        }
    }
    return parse_double(s, "grid") * scale;
}

} // namespace

ChannelConfig parse_channel_config(std::string_view text)
{
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
    if (text.substr(i, 7) == "digraph")
        return parse_dot_config(text);
    return parse_json_config(text);
}

std::string write_channel_config(const ChannelConfig &config)
{
    ojson root;
    root["schema"] = schema_id;
    if (config.grid)
    {
        root["grid"] = {{"start_hz", config.grid->start_hz},
                        {"stop_hz", config.grid->stop_hz},
                        {"points", config.grid->points},
                        {"spacing", config.grid->spacing == Spacing::log ? "log" : "linear"}};
    }
    root["direction"] = config.graph.direction == Direction::left_to_right ? "left_to_right" : "right_to_left";
    if (config.tolerance)
        root["tolerance"] = *config.tolerance;
    if (config.delta_tau_hint)
        root["fit"] = {{"delta_tau_hint_s", *config.delta_tau_hint}};

    root["segments"] = ojson::array();
    for (std::size_t i = 0; i < config.graph.nodes.size(); ++i)
    {
        const auto &s = config.graph.nodes[i];
        ojson seg;
        if (s.is_lc())
        {
            seg["kind"] = "LC";
            seg["t_l_s"] = s.t_l;
        }
        else
        {
            seg["kind"] = "SC";
            seg["delta_tau_s"] = s.delta_tau;
            seg["t_s_s"] = s.t_s;
            if (s.physical)
                seg["physical"] = {{"length_m", s.physical->length},
                                   {"L_H_per_m", matrix_json(s.physical->lc.L)},
                                   {"C_F_per_m", matrix_json(s.physical->lc.C)},
                                   {"t_l_prepend_s", s.physical->t_l_prepend}};
        }
        ojson fit = ojson::array();
        for (const auto &u : config.unknowns)
            if (u.node == i)
                fit.push_back(u.field == FitField::t_l ? "t_l" : u.field == FitField::delta_tau ? "delta_tau" : "t_s");
        if (!fit.empty())
            seg["fit"] = fit;
        root["segments"].push_back(seg);
    }
    return root.dump(2) + "\n";
}

GridSpec parse_grid_arg(std::string_view text)
{
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (true)
    {
        const std::size_t j = text.find(':', i);
        parts.push_back(text.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
        if (j == std::string_view::npos)
            break;
        i = j + 1;
    }
    if (parts.size() != 3 && parts.size() != 4)
        fail("grid must be start:stop:points[:linear|log], got '" + std::string(text) + "'");
    GridSpec g;
    g.start_hz = parse_freq_token(parts[0]);
    g.stop_hz = parse_freq_token(parts[1]);
    std::size_t n = 0;
    const auto r = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), n);
    if (r.ec != std::errc() || r.ptr != parts[2].data() + parts[2].size())
        fail("grid: point count '" + std::string(parts[2]) + "' is not an integer");
    g.points = n;
    if (parts.size() == 4)
    {
        if (parts[3] == "log")
            g.spacing = Spacing::log;
        else if (parts[3] == "linear")
            g.spacing = Spacing::linear;
        else
            fail("grid spacing must be linear or log");
    }
    g.build();
    return g;
}

} // namespace ispg
