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

// ispg command-line tool.
//
//   ispg synth   --config ch.json [--grid G] [--format RI|MA|DB] -o out.s4p
//   ispg skew    meas.s4p --portmap 1,2,3,4 [--max-delay PS] -o skew.csv
//   ispg ispg    --config ch.json [--grid G] [--dot g.dot] -o skew.csv
//   ispg compare --config ch.json [--grid G] [--tolerance 0.05] -o cmp.csv
//   ispg fit     meas.s4p --config template.json --portmap 1,2,3,4 -o fitted.json
//   ispg graph   --config ch.json -o g.dot
//
// Exit codes: 0 ok, 1 compare out of tolerance, 2 usage/config, 3 I/O or
// file parse, 4 numeric. "-o -" writes data to stdout; diagnostics go to
// stderr. ISPG_THREADS caps the worker threads.

#include "ispg/all.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace
{

using namespace ispg;

struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

int exit_code(Errc c)
{
    switch (c)
    {
    case Errc::SyntaxError:
    case Errc::UnsupportedParameter:
    case Errc::UnsupportedVersion:
    case Errc::NonMonotoneFrequency:
        return 3;
    case Errc::GridTooCoarse:
    case Errc::GridMismatch:
    case Errc::NonPropagatingMode:
    case Errc::UncoupledDegenerate:
    case Errc::DegenerateVelocities:
    case Errc::ZeroDeltaTau:
    case Errc::InsufficientBandwidth:
    case Errc::NonConvergent:
        return 4;
    default:
        return 2;
    }
}

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string &path, const std::string &text)
{
    if (path == "-")
    {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw IoError("cannot write '" + path + "'");
}

// "skew.csv" + "delta_tau" -> "skew.delta_tau.csv"
std::string sibling(const std::string &path, const std::string &tag)
{
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "." + tag;
    return path.substr(0, dot) + "." + tag + path.substr(dot);
}

ExecPolicy exec_policy()
{
    ExecPolicy p;
    p.threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("ISPG_THREADS"))
    {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            p.threads = std::min<unsigned>(p.threads, static_cast<unsigned>(v));
    }
    return p;
}

struct Options
{
    std::string config;
    std::string grid;
    std::string portmap;
    std::string format = "RI";
    double tolerance = 0;
    std::string dot;
    std::string output = "-";
    std::string input;
    bool si = false;
    bool json = false;
    bool column_major = false;
    double max_delay_ps = 0;
};

ChannelConfig load_config(const Options &o)
{
    if (o.config.empty())
        throw Error(Errc::ConfigError, "--config is required");
    return parse_channel_config(read_file(o.config));
}

Grid resolve_grid(const Options &o, const ChannelConfig &cfg)
{
    if (!o.grid.empty())
        return parse_grid_arg(o.grid).build();
    if (cfg.grid)
        return cfg.grid->build();
    throw Error(Errc::ConfigError, "no frequency grid: give --grid or a \"grid\" block in the config");
}

std::string render(const Table &t, const Options &o, const std::map<std::string, std::string> &meta)
{
    return o.json ? to_json(t, meta) : to_csv(t);
}

std::string fmt(double v) { return format_number(v); }

FourPortImport load_measurement(const Options &o)
{
    if (o.portmap.empty())
        throw Error(Errc::BadPortMap, "--portmap is required for measured files");
    const PortMap map = PortMap::parse(o.portmap);
    const std::string text = read_file(o.input);
    const TouchstoneDocument doc =
        read_touchstone(text, std::nullopt, o.column_major ? MatrixOrder::column_major : MatrixOrder::row_major);
    FourPortImport imp = to_four_port(doc, map);
    double worst = 0;
    for (double e : imp.discarded_energy)
        worst = std::max(worst, e);
    std::cerr << "discarded reflection/near-end energy: max " << worst << " per frequency\n";
    if (!imp.response.reciprocal)
        std::cerr << "warning: network is not reciprocal\n";
    return imp;
}

// Low-frequency delay estimate from the first grid point, used as the unwrap
// guard when --max-delay is not given: phase/(2 pi f) of the skew ratio and of
// the mode ratio, assuming both are still below pi there.
double dc_anchored_delay(const MixedMode &mm)
{
    const double w = 2 * pi_v<double> * mm.grid.front();
    const double a = std::abs(std::arg(mm.scc21[0] / mm.sdd21[0])) / w;
    const double b = std::abs(std::arg(mm.ssd21[0] / mm.ssd41[0])) / w;
    const double c = std::abs(std::arg(mm.ssd12[0] / mm.ssd32[0])) / w;
    return std::max({a, b, c});
}

int cmd_synth(const Options &o)
{
    const ChannelConfig cfg = load_config(o);
    const Grid grid = resolve_grid(o, cfg);
    const Response resp = synthesize_graph(cfg.graph, grid, exec_policy());
    DataFormat f;
    if (o.format == "RI")
        f = DataFormat::RI;
    else if (o.format == "MA")
        f = DataFormat::MA;
    else if (o.format == "DB")
        f = DataFormat::DB;
    else
        throw Error(Errc::ConfigError, "--format must be RI, MA or DB");
    write_output(o.output, write_touchstone(resp, f));
    return 0;
}

int cmd_skew(const Options &o)
{
    const FourPortImport imp = load_measurement(o);
    const MixedMode mm = to_mixed_mode(imp.response);
    const double max_delay = o.max_delay_ps > 0 ? o.max_delay_ps * 1e-12 : dc_anchored_delay(mm);

    const Profile prof = extract_skew(mm, max_delay);
    const RealVector<double> dtau = delta_tau_from_mixed(mm, max_delay);

    std::vector<double> sorted(dtau.data(), dtau.data() + dtau.size());
    std::nth_element(sorted.begin(), sorted.begin() + long(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];
    std::vector<double> res;
    if (median > 0)
    {
        const auto n_max = static_cast<std::size_t>(std::max(1.0, std::floor(mm.grid.back() * median + 0.5)));
        res = resonance_freqs(median, n_max);
    }
    std::cerr << "median delta_tau: " << fmt(median * 1e12) << " ps\n";
    if (!res.empty())
        std::cerr << "first resonance: " << fmt(res.front() * 1e-9) << " GHz\n";

    const std::map<std::string, std::string> meta{{"verb", "skew"}, {"median_delta_tau_s", fmt(median)}};
    const Table t1 = profile_table(prof, o.si), t2 = delta_tau_table(mm.grid, dtau, o.si), t3 = resonance_table(res, o.si);
    if (o.output == "-")
        write_output("-", render(t1, o, meta) + "\n" + render(t2, o, meta) + "\n" + render(t3, o, meta));
    else
    {
        write_output(o.output, render(t1, o, meta));
        write_output(sibling(o.output, "delta_tau"), render(t2, o, meta));
        write_output(sibling(o.output, "resonances"), render(t3, o, meta));
    }
    return 0;
}

int cmd_ispg(const Options &o)
{
    const ChannelConfig cfg = load_config(o);
    const Grid grid = resolve_grid(o, cfg);
    const Profile prof = evaluate_profile(cfg.graph, grid, exec_policy());
    write_output(o.output, render(profile_table(prof, o.si), o, {{"verb", "ispg"}}));
    if (!o.dot.empty())
        write_output(o.dot, export_graph(cfg.graph));
    return 0;
}

int cmd_compare(const Options &o)
{
    const ChannelConfig cfg = load_config(o);
    const Grid grid = resolve_grid(o, cfg);
    const ExecPolicy pol = exec_policy();
    const Profile model = evaluate_profile(cfg.graph, grid, pol);
    const Profile oracle = oracle_skew(cfg.graph, grid, pol);
    const ProfileComparison<double> c = compare_profiles(model, oracle);
    const double tol = o.tolerance > 0 ? o.tolerance : cfg.tolerance.value_or(0.05);
    const double ratio = c.peak_to_peak_ref > 0 ? c.rms / c.peak_to_peak_ref : (c.rms > 0 ? INFINITY : 0.0);
    const bool ok = ratio <= tol;

    std::cerr << "rms " << fmt(c.rms * 1e12) << " ps, max " << fmt(c.max_abs * 1e12) << " ps, peak-to-peak "
              << fmt(c.peak_to_peak_ref * 1e12) << " ps, rms/ptp " << fmt(ratio) << " (tolerance " << fmt(tol)
              << "): " << (ok ? "within" : "OUT OF") << " tolerance\n";

    const std::map<std::string, std::string> meta{{"verb", "compare"},
                                                  {"rms_s", fmt(c.rms)},
                                                  {"max_abs_s", fmt(c.max_abs)},
                                                  {"peak_to_peak_ref_s", fmt(c.peak_to_peak_ref)},
                                                  {"tolerance", fmt(tol)},
                                                  {"within_tolerance", ok ? "true" : "false"}};
    write_output(o.output, render(comparison_table(model, oracle, "ispg", "oracle", o.si), o, meta));
    return ok ? 0 : 1;
}

int cmd_fit(const Options &o)
{
    ChannelConfig cfg = load_config(o);
    const FourPortImport imp = load_measurement(o);
    const MixedMode mm = to_mixed_mode(imp.response);
    const double max_delay = o.max_delay_ps > 0 ? o.max_delay_ps * 1e-12 : dc_anchored_delay(mm);
    const Profile measured = extract_skew(mm, max_delay);

    double hint = cfg.delta_tau_hint.value_or(0.0);
    if (hint == 0.0)
    {
        const RealVector<double> dtau = delta_tau_from_mixed(mm, max_delay);
        std::vector<double> v(dtau.data(), dtau.data() + dtau.size());
        std::nth_element(v.begin(), v.begin() + long(v.size() / 2), v.end());
        hint = v[v.size() / 2];
        std::cerr << "delta_tau hint from data: " << fmt(hint * 1e12) << " ps\n";
    }

    const FitResult<double> r = fit_parameters(measured, cfg.graph, cfg.unknowns, hint);
    std::cerr << "residual rms " << fmt(r.residual_rms * 1e12) << " ps (grid search " << fmt(r.grid_residual_rms * 1e12)
              << " ps, " << r.iterations << " simplex iterations)\n";

    ChannelConfig out;
    out.graph = r.graph;
    write_output(o.output, write_channel_config(out));
    return 0;
}

int cmd_graph(const Options &o)
{
    const ChannelConfig cfg = load_config(o);
    write_output(o.output, export_graph(cfg.graph));
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Intra-pair skew analysis for cascaded coupled lines"};
    app.require_subcommand(1);
    Options o;

    const auto add_common = [&](CLI::App *c) {
        c->add_option("-o,--output", o.output, "Output file, '-' for stdout")->capture_default_str();
        c->add_flag("--si", o.si, "Hz and seconds instead of GHz and ps");
        c->add_flag("--json", o.json, "JSON envelope instead of CSV");
    };

    auto *synth = app.add_subcommand("synth", "Synthesize and cascade a channel into a 4-port Touchstone file");
    synth->add_option("--config", o.config, "Channel config")->required();
    synth->add_option("--grid", o.grid, "start:stop:points[:log], e.g. 10MHz:70GHz:7000");
    synth->add_option("--format", o.format, "RI, MA or DB")->capture_default_str();
    add_common(synth);

    auto *skew = app.add_subcommand("skew", "Extract skew, delta_tau and resonances from a 4-port file");
    skew->add_option("input", o.input, "Touchstone .s4p file")->required();
    skew->add_option("--portmap", o.portmap, "Library port for file ports 1..4, e.g. 1,2,3,4");
    skew->add_flag("--column-major", o.column_major, "4-port data is column-major");
    skew->add_option("--max-delay", o.max_delay_ps, "Delay bound in ps for the unwrap guard");
    add_common(skew);

    auto *isp = app.add_subcommand("ispg", "Evaluate the skew propagation graph");
    isp->add_option("--config", o.config, "Channel config")->required();
    isp->add_option("--grid", o.grid, "start:stop:points[:log]");
    isp->add_option("--dot", o.dot, "Also write the graph as DOT");
    add_common(isp);

    auto *cmp = app.add_subcommand("compare", "Compare the graph model with the exact cascade");
    cmp->add_option("--config", o.config, "Channel config")->required();
    cmp->add_option("--grid", o.grid, "start:stop:points[:log]");
    cmp->add_option("--tolerance", o.tolerance, "Allowed rms error as a fraction of peak-to-peak");
    add_common(cmp);

    auto *fit = app.add_subcommand("fit", "Fit template parameters to a measured 4-port file");
    fit->add_option("input", o.input, "Touchstone .s4p file")->required();
    fit->add_option("--config", o.config, "Template config with \"fit\" fields")->required();
    fit->add_option("--portmap", o.portmap, "Library port for file ports 1..4");
    fit->add_flag("--column-major", o.column_major, "4-port data is column-major");
    fit->add_option("--max-delay", o.max_delay_ps, "Delay bound in ps for the unwrap guard");
    add_common(fit);

    auto *graph = app.add_subcommand("graph", "Write the channel graph as DOT");
    graph->add_option("--config", o.config, "Channel config")->required();
    add_common(graph);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 2;
    }

    try
    {
        if (synth->parsed())
            return cmd_synth(o);
        if (skew->parsed())
            return cmd_skew(o);
        if (isp->parsed())
            return cmd_ispg(o);
        if (cmp->parsed())
            return cmd_compare(o);
        if (fit->parsed())
            return cmd_fit(o);
        if (graph->parsed())
            return cmd_graph(o);
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    }
    catch (const IoError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
