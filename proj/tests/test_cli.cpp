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

#include "ispg/all.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace ispg;

namespace
{

// Files are prefixed with the running test's name so tests can run in parallel.
std::string path(const std::string &name)
{
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    return std::string(ISPG_TEST_WORKDIR) + "/cli_" + info->name() + "_" + name;
}

void write(const std::string &name, const std::string &text)
{
    std::ofstream(path(name), std::ios::binary) << text;
}

std::string slurp(const std::string &name)
{
    std::ifstream in(path(name), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the CLI with stdout/stderr captured to <tag>.out / <tag>.err.
int run(const std::string &args, const std::string &tag)
{
    const std::string cmd = std::string("\"") + ISPG_CLI_PATH + "\" " + args + " > \"" + path(tag + ".out") +
                            "\" 2> \"" + path(tag + ".err") + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char *worked_cfg = R"({"schema": "ispg-channel/1",
  "grid": {"start_hz": 1e7, "stop_hz": 7e10, "points": 7000},
  "segments": [{"kind": "LC", "t_l_ps": 0.5}, {"kind": "SC", "delta_tau_ps": 33.4, "t_s_ps": 3},
               {"kind": "LC", "t_l_ps": 1}, {"kind": "SC", "delta_tau_ps": 66.2, "t_s_ps": 6}]})";

const char *single_cfg = R"({"schema": "ispg-channel/1",
  "grid": {"start_hz": 1e7, "stop_hz": 2e10, "points": 2000},
  "fit": {"delta_tau_hint_ps": 88},
  "segments": [{"kind": "LC", "t_l_ps": 0.8}, {"kind": "SC", "delta_tau_ps": 88, "t_s_ps": 6, "fit": ["t_s"]}]})";

} // namespace

TEST(Cli, IspgWorkedExample)
{
    write("worked.json", worked_cfg);
    ASSERT_EQ(run("ispg --config " + path("worked.json") + " -o " + path("ispg.csv") + " --dot " + path("ispg.dot"), "ispg"), 0);
    const Table t = parse_csv(slurp("ispg.csv"));
    ASSERT_EQ(t.rows.size(), 7000u);
    EXPECT_EQ(t.columns[0], "freq_ghz");
    EXPECT_NEAR(t.rows[0][1], 10.5, 0.05);
    EXPECT_NEAR(t.rows[0][2], 10.5, 0.05);
    EXPECT_NE(slurp("ispg.dot").find("digraph"), std::string::npos);
}

TEST(Cli, IspgGridOverrideAndSi)
{
    write("worked.json", worked_cfg);
    ASSERT_EQ(run("ispg --config " + path("worked.json") + " --grid 1GHz:2GHz:3 --si", "ispg_si"), 0);
    const Table t = parse_csv(slurp("ispg_si.out"));
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.columns[1], "skew21_s");
    EXPECT_DOUBLE_EQ(t.rows[2][0], 2e9);
}

TEST(Cli, SynthThenSkewRecoversDelta)
{
    write("single.json", single_cfg);
    ASSERT_EQ(run("synth --config " + path("single.json") + " -o " + path("single.s4p"), "synth"), 0);
    ASSERT_EQ(run("skew " + path("single.s4p") + " --portmap 1,2,3,4 -o " + path("skew.csv"), "skew"), 0);

    const Table prof = parse_csv(slurp("skew.csv"));
    const Table dtau = parse_csv(slurp("skew.delta_tau.csv"));
    const Table res = parse_csv(slurp("skew.resonances.csv"));
    ASSERT_EQ(prof.rows.size(), 2000u);
    EXPECT_NEAR(prof.rows[0][1], 6.8, 0.01);
    // the mode phase difference reads slightly short of delta_tau for an
    // asymmetric segment (t_s / delta_tau = 0.07 here)
    for (const auto &row : dtau.rows)
        ASSERT_NEAR(row[1], 88.0, 0.5);
    ASSERT_FALSE(res.rows.empty());
    EXPECT_NEAR(res.rows[0][1], 5.68, 0.05);
    EXPECT_NE(slurp("skew.err").find("first resonance"), std::string::npos);

    // port swap of P and N negates the skew
    ASSERT_EQ(run("skew " + path("single.s4p") + " --portmap 3,4,1,2 -o " + path("skew_swap.csv"), "skew_swap"), 0);
    const Table swapped = parse_csv(slurp("skew_swap.csv"));
    for (std::size_t k = 0; k < prof.rows.size(); ++k)
        ASSERT_NEAR(swapped.rows[k][1], -prof.rows[k][1], 1e-9);
}

TEST(Cli, SkewToStdoutHasThreeTables)
{
    write("single.json", single_cfg);
    ASSERT_EQ(run("synth --config " + path("single.json") + " --grid 1GHz:20GHz:20 --format MA -o " + path("small.s4p"), "synth_small"), 0);
    ASSERT_EQ(run("skew " + path("small.s4p") + " --portmap 1,2,3,4 --max-delay 100", "skew_stdout"), 0);
    const std::string out = slurp("skew_stdout.out");
    EXPECT_NE(out.find("freq_ghz,skew21_ps"), std::string::npos);
    EXPECT_NE(out.find("freq_ghz,delta_tau_ps"), std::string::npos);
    EXPECT_NE(out.find("n,freq_ghz"), std::string::npos);
}

TEST(Cli, CompareExitCodes)
{
    write("worked.json", worked_cfg);
    EXPECT_EQ(run("compare --config " + path("worked.json") + " -o " + path("cmp.csv"), "cmp"), 0);
    EXPECT_NE(slurp("cmp.err").find("within tolerance"), std::string::npos);
    EXPECT_EQ(parse_csv(slurp("cmp.csv")).columns.size(), 5u);
    EXPECT_EQ(run("compare --config " + path("worked.json") + " --tolerance 1e-9", "cmp_tight"), 1);
}

TEST(Cli, FitRecoversTemplate)
{
    write("single.json", single_cfg);
    ASSERT_EQ(run("synth --config " + path("single.json") + " --grid 10MHz:40GHz:4000 -o " + path("fit.s4p"), "fit_synth"), 0);
    ASSERT_EQ(run("synth --config " + path("single.json") + " -o " + path("narrow.s4p"), "narrow_synth"), 0);
    const std::string templ = R"({"schema": "ispg-channel/1", "fit": {"delta_tau_hint_ps": 88},
      "segments": [{"kind": "LC", "t_l_ps": 0, "fit": ["t_l"]},
                   {"kind": "SC", "delta_tau_ps": 0, "t_s_ps": 0, "fit": ["delta_tau", "t_s"]}]})";
    write("templ.json", templ);
    ASSERT_EQ(run("fit " + path("fit.s4p") + " --portmap 1,2,3,4 --config " + path("templ.json") + " -o " + path("fitted.json"), "fit"), 0);
    const ChannelConfig cfg = parse_channel_config(slurp("fitted.json"));

    // 20 GHz of data spans fewer than two periods of an 88 ps segment
    EXPECT_EQ(run("fit " + path("narrow.s4p") + " --portmap 1,2,3,4 --config " + path("templ.json"), "fit_narrow"), 4);
    EXPECT_NE(slurp("fit_narrow.err").find("InsufficientBandwidth"), std::string::npos);
    ASSERT_EQ(cfg.graph.nodes.size(), 2u);
    EXPECT_NEAR(cfg.graph.nodes[0].t_l, 0.8e-12, 0.05e-12);
    EXPECT_NEAR(cfg.graph.nodes[1].delta_tau, 88e-12, 0.1e-12);
    EXPECT_NEAR(cfg.graph.nodes[1].t_s, 6e-12, 0.05e-12);
}

TEST(Cli, GraphVerb)
{
    write("worked.json", worked_cfg);
    ASSERT_EQ(run("graph --config " + path("worked.json"), "graph"), 0);
    const std::string dot = slurp("graph.out");
    EXPECT_EQ(dot.rfind("digraph", 0), 0u);
    write("worked.dot", dot);
    ASSERT_EQ(run("graph --config " + path("worked.dot"), "graph_again"), 0);
    EXPECT_EQ(slurp("graph_again.out"), dot);
}

TEST(Cli, ErrorExitCodes)
{
    write("empty.json", R"({"schema": "ispg-channel/1", "segments": []})");
    EXPECT_EQ(run("ispg --config " + path("empty.json") + " --grid 1GHz:2GHz:3", "err_empty"), 2);
    EXPECT_NE(slurp("err_empty.err").find("segments"), std::string::npos);

    EXPECT_EQ(run("ispg --config " + path("does_not_exist.json"), "err_missing"), 3);

    write("bad.s4p", "# GHZ S RI\n1 0 0 0 x\n");
    EXPECT_EQ(run("skew " + path("bad.s4p") + " --portmap 1,2,3,4", "err_syntax"), 3);
    EXPECT_NE(slurp("err_syntax.err").find("line 2"), std::string::npos);

    write("worked.json", worked_cfg);
    ASSERT_EQ(run("synth --config " + path("worked.json") + " --grid 10MHz:70GHz:5 -o " + path("coarse.s4p"), "coarse_synth"), 0);
    EXPECT_EQ(run("skew " + path("coarse.s4p") + " --portmap 1,2,3,4", "err_coarse"), 4);

    EXPECT_EQ(run("skew " + path("coarse.s4p"), "err_noportmap"), 2);
    EXPECT_EQ(run("frobnicate", "err_verb"), 2);
    EXPECT_EQ(run("ispg --config " + path("worked.json") + " --grid nonsense", "err_grid"), 2);
}

TEST(Cli, OutputIsDeterministic)
{
    write("worked.json", worked_cfg);
    ASSERT_EQ(run("synth --config " + path("worked.json") + " --grid 10MHz:70GHz:700 -o " + path("det_a.s4p"), "det_a"), 0);
    ASSERT_EQ(setenv("ISPG_THREADS", "1", 1), 0);
    ASSERT_EQ(run("synth --config " + path("worked.json") + " --grid 10MHz:70GHz:700 -o " + path("det_b.s4p"), "det_b"), 0);
    unsetenv("ISPG_THREADS");
    EXPECT_EQ(slurp("det_a.s4p"), slurp("det_b.s4p"));
    ASSERT_EQ(run("ispg --config " + path("worked.json") + " -o " + path("det_c.csv"), "det_c"), 0);
    ASSERT_EQ(run("ispg --config " + path("worked.json") + " -o " + path("det_d.csv"), "det_d"), 0);
    EXPECT_EQ(slurp("det_c.csv"), slurp("det_d.csv"));
}
