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

#include "ispg/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace ispg
{

namespace
{

struct Token
{
    double value;
    std::size_t line;
};

std::string upper(std::string_view s)
{
    std::string out(s);
    for (auto &c : out)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size())
    {
        while (i < s.size() && is_space(s[i]))
            ++i;
        const std::size_t j = i;
        while (i < s.size() && !is_space(s[i]))
            ++i;
        if (i > j)
            out.push_back(s.substr(j, i - j));
    }
    return out;
}

std::optional<double> to_number(std::string_view tok)
{
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    if (tok.empty())
        return std::nullopt;
    double v = 0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

double unit_scale(FreqUnit u)
{
    switch (u)
    {
    case FreqUnit::Hz: return 1.0;
    case FreqUnit::kHz: return 1e3;
    case FreqUnit::MHz: return 1e6;
    case FreqUnit::GHz: return 1e9;
    }
    return 1.0;
}

OptionLine parse_option_line(std::string_view body, std::size_t line)
{
    OptionLine opt;
    const auto toks = split_ws(body);
    for (std::size_t i = 0; i < toks.size(); ++i)
    {
        const std::string t = upper(toks[i]);
        if (t == "HZ")
            opt.freq_unit = FreqUnit::Hz;
        else if (t == "KHZ")
            opt.freq_unit = FreqUnit::kHz;
        else if (t == "MHZ")
            opt.freq_unit = FreqUnit::MHz;
        else if (t == "GHZ")
            opt.freq_unit = FreqUnit::GHz;
        else if (t == "S")
            continue;
        else if (t == "Y" || t == "Z" || t == "H" || t == "G")
            throw ParseError(Errc::UnsupportedParameter, line, "parameter type " + t + " is not supported, only S");
        else if (t == "RI")
            opt.format = DataFormat::RI;
        else if (t == "MA")
            opt.format = DataFormat::MA;
        else if (t == "DB")
            opt.format = DataFormat::DB;
        else if (t == "R")
        {
            if (i + 1 >= toks.size())
                throw ParseError(Errc::SyntaxError, line, "R without a reference impedance");
            const auto r = to_number(toks[++i]);
            if (!r || !(*r > 0))
                throw ParseError(Errc::SyntaxError, line, "invalid reference impedance");
            opt.reference_ohms = *r;
        }
        else
            throw ParseError(Errc::SyntaxError, line, "unknown option token '" + std::string(toks[i]) + "'");
    }
    return opt;
}

std::complex<double> to_complex(double a, double b, DataFormat f)
{
    constexpr double deg = 3.14159265358979323846 / 180.0;
    switch (f)
    {
    case DataFormat::RI: return {a, b};
    case DataFormat::MA: return std::polar(a, b * deg);
    case DataFormat::DB: return std::polar(std::pow(10.0, a / 20.0), b * deg);
    }
    return {a, b};
}

} // namespace

TouchstoneDocument read_touchstone(std::string_view text, std::optional<int> n_ports, MatrixOrder order)
{
    TouchstoneDocument doc;
    bool have_option = false;
    std::vector<Token> tokens;
    std::vector<std::pair<std::size_t, std::size_t>> line_counts; // (line, tokens) for data lines

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const std::size_t bang = line.find('!');
        if (bang != std::string_view::npos)
        {
            doc.comments.emplace_back(line.substr(bang + 1));
            line = line.substr(0, bang);
        }
        std::size_t first = 0;
        while (first < line.size() && is_space(line[first]))
            ++first;
        line.remove_prefix(first);
        if (line.empty())
            continue;

        if (line.front() == '[')
            throw ParseError(Errc::UnsupportedVersion, line_no, "Touchstone v2 keywords are not supported");
        if (line.front() == '#')
        {
            // Only the first option line counts; later ones are ignored.
            if (!have_option)
            {
                doc.option_line = parse_option_line(line.substr(1), line_no);
                have_option = true;
            }
            continue;
        }

        const auto toks = split_ws(line);
        for (const auto &t : toks)
        {
            const auto v = to_number(t);
            if (!v)
                throw ParseError(Errc::SyntaxError, line_no, "'" + std::string(t.substr(0, 32)) + "' is not a finite number");
            tokens.push_back({*v, line_no});
        }
        line_counts.emplace_back(line_no, toks.size());
    }

    if (tokens.empty())
        throw ParseError(Errc::SyntaxError, line_no, "no network data");

    int n = 0;
    if (n_ports)
    {
        n = *n_ports;
        if (n < 1 || n > 4)
            throw ParseError(Errc::SyntaxError, 0, "only 1 to 4 ports are supported");
    }
    else
    {
        // A record starts on a line with an odd token count (frequency plus
        // pairs); the record length follows from the distance to the next one.
        std::size_t total = 0;
        for (std::size_t i = 0; i < line_counts.size(); ++i)
        {
            if (i > 0 && line_counts[i].second % 2 == 1)
                break;
            total += line_counts[i].second;
        }
        for (int k = 1; k <= 4; ++k)
            if (std::size_t(1 + 2 * k * k) == total)
                n = k;
        if (n == 0)
            throw ParseError(Errc::SyntaxError, line_counts.front().first,
                             "cannot infer the port count from a record of " + std::to_string(total) + " values");
    }
    doc.n_ports = n;

    const std::size_t rec = std::size_t(1 + 2 * n * n);
    if (tokens.size() % rec != 0)
        throw ParseError(Errc::SyntaxError, tokens.back().line, "truncated record: data count is not a multiple of " + std::to_string(rec));

    const double scale = unit_scale(doc.option_line.freq_unit);
    const std::size_t n_rec = tokens.size() / rec;
    doc.freqs_hz.reserve(n_rec);
    doc.data.reserve(n_rec);
    for (std::size_t r = 0; r < n_rec; ++r)
    {
        const Token *t = &tokens[r * rec];
        const double f = t[0].value * scale;
        if (!std::isfinite(f) || f < 0)
            throw ParseError(Errc::SyntaxError, t[0].line, "frequency must be finite and non-negative");
        if (!doc.freqs_hz.empty() && !(f > doc.freqs_hz.back()))
            throw ParseError(Errc::NonMonotoneFrequency, t[0].line, "frequencies must be strictly increasing");

        Eigen::MatrixXcd m(n, n);
        for (int q = 0; q < n * n; ++q)
        {
            const auto c = to_complex(t[1 + 2 * q].value, t[2 + 2 * q].value, doc.option_line.format);
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw ParseError(Errc::SyntaxError, t[1 + 2 * q].line, "value overflows");
            int row, col;
            if (n == 2)
                row = q % 2, col = q / 2; // S11 S21 S12 S22
            else if (order == MatrixOrder::row_major)
                row = q / n, col = q % n;
            else
                row = q % n, col = q / n;
            m(row, col) = c;
        }
        doc.freqs_hz.push_back(f);
        doc.data.push_back(std::move(m));
    }
    return doc;
}

PortMap PortMap::parse(std::string_view text)
{
    PortMap m;
    std::size_t k = 0, i = 0;
    while (i <= text.size())
    {
        std::size_t j = text.find(',', i);
        if (j == std::string_view::npos)
            j = text.size();
        std::string_view tok = text.substr(i, j - i);
        while (!tok.empty() && is_space(tok.front()))
            tok.remove_prefix(1);
        while (!tok.empty() && is_space(tok.back()))
            tok.remove_suffix(1);
        int v = 0;
        const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (k >= 4 || r.ec != std::errc() || r.ptr != tok.data() + tok.size())
            throw Error(Errc::BadPortMap, "port map must be four comma-separated port numbers, got '" + std::string(text) + "'");
        m.file_to_lib[k++] = v;
        i = j + 1;
    }
    if (k != 4)
        throw Error(Errc::BadPortMap, "port map must list exactly four ports");
    m.validate();
    return m;
}

void PortMap::validate() const
{
    std::array<int, 4> s = file_to_lib;
    std::sort(s.begin(), s.end());
    if (s != std::array<int, 4>{1, 2, 3, 4})
        throw Error(Errc::BadPortMap, "port map is not a permutation of 1..4");
}

FourPortImport to_four_port(const TouchstoneDocument &doc, const PortMap &map)
{
    if (doc.n_ports != 4)
        throw Error(Errc::BadPortMap, "a 4-port document is required, got " + std::to_string(doc.n_ports) + " ports");
    map.validate();

    FourPortImport out;
    out.response.grid = Grid(doc.freqs_hz);
    const std::size_t n = doc.freqs_hz.size();
    out.response.forward.resize(n);
    out.response.reverse.resize(n);
    out.discarded_energy.resize(n);
    out.reciprocity_error.resize(n);

    double worst = 0;
    for (std::size_t k = 0; k < n; ++k)
    {
        Eigen::Matrix4cd lib;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                lib(map.file_to_lib[i] - 1, map.file_to_lib[j] - 1) = doc.data[k](i, j);

        // 0-based: P-left 0, P-right 1, N-left 2, N-right 3
        out.response.forward[k] << lib(1, 0), lib(1, 2), lib(3, 0), lib(3, 2);
        out.response.reverse[k] << lib(0, 1), lib(0, 3), lib(2, 1), lib(2, 3);

        double dropped = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
            {
                const bool left_i = i == 0 || i == 2, left_j = j == 0 || j == 2;
                if (left_i == left_j)
                    dropped += std::norm(lib(i, j));
            }
        double rec = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                rec = std::max(rec, std::abs(lib(i, j) - lib(j, i)));
        out.discarded_energy[k] = dropped;
        out.reciprocity_error[k] = rec;
        worst = std::max(worst, rec);
    }
    out.response.reciprocal = worst <= 1e-9;
    return out;
}

namespace
{

void append_number(std::string &s, double v)
{
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    s.append(buf, r.ptr);
}

} // namespace

std::string write_touchstone(const Response &resp, DataFormat format)
{
    constexpr double deg = 180.0 / 3.14159265358979323846;
    std::string out = "! 4-port S-parameters, matched segments\n";
    out += "! ports: 1 P-left, 2 P-right, 3 N-left, 4 N-right\n";
    out += "# HZ S ";
    out += format == DataFormat::RI ? "RI" : format == DataFormat::MA ? "MA" : "DB";
    out += " R 50\n";

    for (std::size_t k = 0; k < resp.size(); ++k)
    {
        Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
        const auto &F = resp.forward[k];
        const auto &R = resp.reverse[k];
        m(1, 0) = F(0, 0), m(1, 2) = F(0, 1), m(3, 0) = F(1, 0), m(3, 2) = F(1, 1);
        m(0, 1) = R(0, 0), m(0, 3) = R(0, 1), m(2, 1) = R(1, 0), m(2, 3) = R(1, 1);

        for (int i = 0; i < 4; ++i)
        {
            if (i == 0)
                append_number(out, resp.grid[k]);
            else
                out += ' ';
            for (int j = 0; j < 4; ++j)
            {
                const std::complex<double> c = m(i, j);
                double a, b;
                if (format == DataFormat::RI)
                    a = c.real(), b = c.imag();
                else
                {
                    const double mag = std::abs(c);
                    b = mag == 0 ? 0.0 : std::arg(c) * deg;
                    // zero magnitude has no finite dB value; -1000 dB is 1e-50
                    a = format == DataFormat::MA ? mag : (mag == 0 ? -1000.0 : 20.0 * std::log10(mag));
                }
                out += ' ';
                append_number(out, a);
                out += ' ';
                append_number(out, b);
            }
            out += '\n';
        }
    }
    return out;
}

} // namespace ispg
