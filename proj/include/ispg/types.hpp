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

// Shared data model: frequency grids, per-frequency 4-port transmission blocks,
// segment descriptors and skew profiles. No physics lives here.
//
// Port picture used throughout the library:
//
//      1 (P-left)  ----------------  2 (P-right)
//      3 (N-left)  ----------------  4 (N-right)
//
// `skew_21` is the skew of a signal launched at the left differential port and
// observed at the right end; `skew_12` is the reverse direction.
//
// All times are in seconds and all frequencies in Hz.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ispg
{

// ------------------------------------------------------------------------
// Errors

enum class Errc
{
    NonPositiveFrequency,
    EmptyGrid,
    InvalidSegment,
    InconsistentPhysicalParams,
    NegativeLength,
    NonPropagatingMode,
    UncoupledDegenerate,
    DegenerateVelocities,
    GridTooCoarse,
    GridMismatch,
    ZeroDeltaTau,
    InsufficientBandwidth,
    NonConvergent,
    OverParameterized,
    SyntaxError,
    UnsupportedParameter,
    UnsupportedVersion,
    NonMonotoneFrequency,
    BadPortMap,
    ConfigError
};

inline const char *errc_name(Errc code)
{
    switch (code)
    {
    case Errc::NonPositiveFrequency: return "NonPositiveFrequency";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::InvalidSegment: return "InvalidSegment";
    case Errc::InconsistentPhysicalParams: return "InconsistentPhysicalParams";
    case Errc::NegativeLength: return "NegativeLength";
    case Errc::NonPropagatingMode: return "NonPropagatingMode";
    case Errc::UncoupledDegenerate: return "UncoupledDegenerate";
    case Errc::DegenerateVelocities: return "DegenerateVelocities";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::ZeroDeltaTau: return "ZeroDeltaTau";
    case Errc::InsufficientBandwidth: return "InsufficientBandwidth";
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::OverParameterized: return "OverParameterized";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnsupportedParameter: return "UnsupportedParameter";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::NonMonotoneFrequency: return "NonMonotoneFrequency";
    case Errc::BadPortMap: return "BadPortMap";
    case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error
{
  public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

// ------------------------------------------------------------------------
// Scalar helpers

template <typename Scalar>
using Complex = std::complex<Scalar>;

// 2x2 complex transmission block, one per frequency.
template <typename Scalar>
using Block = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
constexpr Scalar pi_v = Scalar(3.141592653589793238462643383279502884L);

// Unnormalized sinc, sin(x)/x with sinc(0) = 1.
template <typename Scalar>
Scalar sinc(Scalar x)
{
    using std::sin;
    return x == Scalar(0) ? Scalar(1) : sin(x) / x;
}

// ------------------------------------------------------------------------
// FrequencyGrid

enum class Spacing
{
    linear,
    log
};

// Strictly increasing, strictly positive frequency points. f = 0 is never
// part of a grid; low-frequency limits are taken at the first point.
template <typename Scalar>
class FrequencyGrid
{
  public:
    FrequencyGrid() = default;

    explicit FrequencyGrid(std::vector<Scalar> points)
        : points_(std::move(points))
    {
        if (points_.empty())
            throw Error(Errc::EmptyGrid, "frequency grid has no points");
        for (std::size_t k = 0; k < points_.size(); ++k)
        {
            if (!(points_[k] > Scalar(0)) || !std::isfinite(static_cast<double>(points_[k])))
                throw Error(Errc::NonPositiveFrequency, "frequency point " + std::to_string(k) + " is not a positive finite value");
            if (k > 0)
            {
                if (!(points_[k] > points_[k - 1]))
                    throw Error(Errc::NonMonotoneFrequency, "frequency grid is not strictly increasing at point " + std::to_string(k));
                max_spacing_ = std::max(max_spacing_, points_[k] - points_[k - 1]);
            }
        }
    }

    std::size_t size() const noexcept { return points_.size(); }
    Scalar operator[](std::size_t k) const { return points_[k]; }
    Scalar front() const { return points_.front(); }
    Scalar back() const { return points_.back(); }
    const std::vector<Scalar> &points() const noexcept { return points_; }

    // Largest adjacent spacing; 0 for a single-point grid.
    Scalar max_spacing() const noexcept { return max_spacing_; }

    bool operator==(const FrequencyGrid &other) const { return points_ == other.points_; }

  private:
    std::vector<Scalar> points_;
    Scalar max_spacing_ = Scalar(0);
};

template <typename Scalar>
FrequencyGrid<Scalar> make_grid(Scalar f_start, Scalar f_stop, std::size_t n_points, Spacing spacing = Spacing::linear)
{
    if (!(f_start > Scalar(0)) || !(f_stop > Scalar(0)))
        throw Error(Errc::NonPositiveFrequency, "grid bounds must be positive");
    if (n_points < 2 || !(f_stop > f_start))
        throw Error(Errc::EmptyGrid, "grid needs f_start < f_stop and at least two points");

    std::vector<Scalar> pts(n_points);
    const Scalar last = Scalar(n_points - 1);
    for (std::size_t k = 0; k < n_points; ++k)
    {
        const Scalar t = Scalar(k) / last;
        if (spacing == Spacing::linear)
            pts[k] = f_start + (f_stop - f_start) * t;
        else
        {
            using std::exp;
            using std::log;
            pts[k] = exp(log(f_start) + (log(f_stop) - log(f_start)) * t);
        }
    }
    pts.front() = f_start;
    pts.back() = f_stop;
    return FrequencyGrid<Scalar>(std::move(pts));
}

// ------------------------------------------------------------------------
// Segments

// Per-unit-length inductance (H/m) and capacitance (F/m) of a coupled pair.
// Row/column 1 is the P conductor, 2 the N conductor.
template <typename Scalar>
struct LcMatrices
{
    Eigen::Matrix<Scalar, 2, 2> L = Eigen::Matrix<Scalar, 2, 2>::Zero();
    Eigen::Matrix<Scalar, 2, 2> C = Eigen::Matrix<Scalar, 2, 2>::Zero();

    bool operator==(const LcMatrices &o) const { return L == o.L && C == o.C; }
};

template <typename Scalar>
struct PhysicalSegment
{
    LcMatrices<Scalar> lc;
    Scalar length = Scalar(0);      // m
    Scalar t_l_prepend = Scalar(0); // s, single-ended delay in front of the P line

    bool operator==(const PhysicalSegment &o) const
    {
        return lc == o.lc && length == o.length && t_l_prepend == o.t_l_prepend;
    }
};

enum class SegmentKind
{
    LC, // loosely coupled: flat skew t_l
    SC  // strongly coupled: mode delay difference delta_tau, skew amplitude t_s
};

template <typename Scalar>
struct SegmentSpec
{
    SegmentKind kind = SegmentKind::LC;
    Scalar t_l = Scalar(0);       // LC only
    Scalar delta_tau = Scalar(0); // SC only, tau_pi - tau_c
    Scalar t_s = Scalar(0);       // SC only
    std::optional<PhysicalSegment<Scalar>> physical;

    static SegmentSpec lc(Scalar t_l)
    {
        SegmentSpec s;
        s.kind = SegmentKind::LC;
        s.t_l = t_l;
        return s;
    }

    static SegmentSpec sc(Scalar delta_tau, Scalar t_s)
    {
        SegmentSpec s;
        s.kind = SegmentKind::SC;
        s.delta_tau = delta_tau;
        s.t_s = t_s;
        return s;
    }

    bool is_lc() const noexcept { return kind == SegmentKind::LC; }
    bool is_sc() const noexcept { return kind == SegmentKind::SC; }

    bool operator==(const SegmentSpec &o) const
    {
        return kind == o.kind && t_l == o.t_l && delta_tau == o.delta_tau && t_s == o.t_s && physical == o.physical;
    }
};

// ------------------------------------------------------------------------
// Responses and profiles

// Matched, reflectionless 4-port.
//   forward[k] = [[S21, S23], [S41, S43]]  maps (a1, a3) -> (b2, b4)
//   reverse[k] = [[S12, S14], [S32, S34]]  maps (a2, a4) -> (b1, b3)
template <typename Scalar>
struct FourPortResponse
{
    FrequencyGrid<Scalar> grid;
    std::vector<Block<Scalar>> forward;
    std::vector<Block<Scalar>> reverse;
    bool reciprocal = true;

    std::size_t size() const noexcept { return grid.size(); }
};

template <typename Scalar>
struct SkewProfile
{
    FrequencyGrid<Scalar> grid;
    RealVector<Scalar> skew_21; // left -> right, observed at the right end
    RealVector<Scalar> skew_12; // right -> left, observed at the left end
};

template <typename Scalar>
struct MixedModeResponse
{
    FrequencyGrid<Scalar> grid;
    ComplexVector<Scalar> sdd21, scc21, scd21, sdc21;
    ComplexVector<Scalar> ssd21, ssd41, ssd12, ssd32;
};

// ------------------------------------------------------------------------
// Per-frequency parallelism

struct ExecPolicy
{
    unsigned threads = 1;
};

namespace detail
{

// Runs fn(k) for k in [0, n). Each index is touched by exactly one thread.
template <typename Fn>
void parallel_for(std::size_t n, const ExecPolicy &policy, Fn &&fn)
{
    const std::size_t workers = std::min<std::size_t>(std::max(1u, policy.threads), std::max<std::size_t>(1, n / 256));
    if (workers <= 1)
    {
        for (std::size_t k = 0; k < n; ++k)
            fn(k);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
    {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t k = lo; k < hi; ++k)
                fn(k);
        });
    }
    for (auto &t : pool)
        t.join();
}

} // namespace detail

using Grid = FrequencyGrid<double>;
using Segment = SegmentSpec<double>;
using Response = FourPortResponse<double>;
using Profile = SkewProfile<double>;
using MixedMode = MixedModeResponse<double>;
using Lc = LcMatrices<double>;

} // namespace ispg
