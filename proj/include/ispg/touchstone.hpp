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

// Touchstone v1.x reader and writer (S parameters, 2 and 4 ports).
//
// Grammar accepted by read_touchstone:
//
//      file     := { comment | option | data | blank }
//      comment  := '!' text                    (also after data on any line)
//      option   := '#' [unit] [S] [format] [R ohms]   tokens in any order
//      unit     := HZ | KHZ | MHZ | GHZ        (default GHZ)
//      format   := RI | MA | DB                (default MA)
//      data     := freq followed by 2 n^2 numbers, free line wrapping
//
// Any '[' keyword (v2 section) is rejected. For 2-port files the entries are
// S11 S21 S12 S22; 4-port files are row-major unless column-major is
// requested.

#pragma once

#include "types.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ispg
{

enum class FreqUnit
{
    Hz,
    kHz,
    MHz,
    GHz
};

enum class DataFormat
{
    RI,
    MA,
    DB
};

struct OptionLine
{
    FreqUnit freq_unit = FreqUnit::GHz;
    DataFormat format = DataFormat::MA;
    double reference_ohms = 50.0;
};

struct TouchstoneDocument
{
    OptionLine option_line;
    int n_ports = 0;
    std::vector<double> freqs_hz;
    std::vector<Eigen::MatrixXcd> data; // n_ports x n_ports per frequency
    std::vector<std::string> comments;
};

// Error with the offending 1-based line number (0 when not line specific).
class ParseError : public Error
{
  public:
    ParseError(Errc code, std::size_t line, const std::string &reason)
        : Error(code, "line " + std::to_string(line) + ": " + reason), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

enum class MatrixOrder
{
    row_major,
    column_major
};

// n_ports is inferred from the first data record when not given.
TouchstoneDocument read_touchstone(std::string_view text, std::optional<int> n_ports = std::nullopt,
                                   MatrixOrder order = MatrixOrder::row_major);

// Library port (1 = P-left, 2 = P-right, 3 = N-left, 4 = N-right) for each
// file port: map[file_port - 1] = library port.
struct PortMap
{
    std::array<int, 4> file_to_lib{1, 2, 3, 4};

    static PortMap identity() { return {}; }
    static PortMap parse(std::string_view text); // "1,2,3,4"
    void validate() const;
};

struct FourPortImport
{
    Response response;
    std::vector<double> discarded_energy; // sum |S|^2 of dropped entries, per frequency
    std::vector<double> reciprocity_error; // max |S_ij - S_ji|, per frequency
};

FourPortImport to_four_port(const TouchstoneDocument &doc, const PortMap &map);

std::string write_touchstone(const Response &resp, DataFormat format = DataFormat::RI);

} // namespace ispg
