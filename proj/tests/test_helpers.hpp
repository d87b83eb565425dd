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

#pragma once

#include "ispg/all.hpp"

#include <gtest/gtest.h>

constexpr double ps = 1e-12;
constexpr double GHz = 1e9;
constexpr double MHz = 1e6;

#define EXPECT_ERRC(stmt, expected_)                                                                                   \
    do                                                                                                                 \
    {                                                                                                                  \
        try                                                                                                            \
        {                                                                                                              \
            stmt;                                                                                                      \
            ADD_FAILURE() << "expected " << ispg::errc_name(expected_);                                                \
        }                                                                                                              \
        catch (const ispg::Error &e_)                                                                                  \
        {                                                                                                              \
            EXPECT_EQ(e_.code(), expected_) << e_.what();                                                              \
        }                                                                                                              \
    } while (0)

inline ispg::Lc make_lc(double L11, double L12, double L21, double L22, double C11, double C12, double C21, double C22)
{
    ispg::Lc lc;
    lc.L << L11 * 1e-9, L12 * 1e-9, L21 * 1e-9, L22 * 1e-9;
    lc.C << C11 * 1e-12, C12 * 1e-12, C21 * 1e-12, C22 * 1e-12;
    return lc;
}

// Coupled symmetric pair with distinct mode velocities.
inline ispg::Lc symmetric_lc() { return make_lc(400, 120, 120, 400, 100, -20, -20, 100); }

// Worked example channel: LC(0.5) -> SC(33.4, 3) -> LC(1) -> SC(66.2, 6), ps.
inline ispg::IspgGraph<double> worked_example()
{
    using ispg::Segment;
    return ispg::IspgGraph<double>({Segment::lc(0.5 * ps), Segment::sc(33.4 * ps, 3 * ps), Segment::lc(1 * ps),
                                    Segment::sc(66.2 * ps, 6 * ps)});
}
