#pragma once

#include "mcf/flows.hpp"
#include "mcf/kernel.hpp"
#include "mcf/types.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mcf {

struct QuadConfig {
    Real rel_tol = 1e-8;
    Real abs_tol = 1e-12;
    int max_depth = 40;
    // Gaussian-weighted integrands are truncated where the kernel weight drops
    // below trunc_delta times its maximum over the slice.
    Real trunc_delta = 1e-16;
};

struct QuadResult {
    Real value = 0;
    Real error_estimate = 0;
    long evaluations = 0;
    bool converged = true;

    QuadResult& operator+=(const QuadResult& o)
    {
        value += o.value;
        error_estimate += o.error_estimate;
        evaluations += o.evaluations;
        converged = converged && o.converged;
        return *this;
    }
};

struct QuadratureError : std::runtime_error {
    QuadResult result;
    QuadratureError(const std::string& what, QuadResult r)
        : std::runtime_error(what), result(r)
    {
    }
};

// Adaptive Gauss-Kronrod 15/7 over a set of segments.
QuadResult integrate_adaptive(const std::function<Real(Real)>& f,
                              std::span<const Interval> segments, const QuadConfig& cfg);
QuadResult integrate_adaptive(const std::function<Real(Real)>& f, Real a, Real b,
                              const QuadConfig& cfg);

struct LimitEstimate {
    Real limit = 0;     // geometric-tail extrapolation (last value if no ratio)
    Real error_bar = 0; // extrapolation-based bound on |limit - truth|
    Real last_value = 0;
    Real tail_diff = 0; // |v_last - v_prev|
    bool monotone = true;
    bool converged = true;
};

// Limit of a monotone schedule of values; flags sequences that are
// non-monotone beyond `slack`. Requires at least 3 points.
LimitEstimate improper_limit(std::span<const Real> values, Real slack = 1e-9);

// Integrand of a slice integral. `f` must be invariant under rotations about
// the axis through `center` for rotationally symmetric flows evaluated in
// reduced mode; every kernel-built integrand is, since it sees the position
// only through center-relative invariants. A Gaussian weight scale enables
// domain truncation on unbounded charts.
struct SliceIntegrand {
    std::function<Real(const SliceGeometry&)> f;
    std::optional<AmbientVec> center;
    std::optional<Real> gaussian_tau; // t - t0 < 0 of the kernel weight
};

QuadResult integrate_slice(const AncientFlow& flow, Real t, const SliceIntegrand& integrand,
                           const BallRestriction* restriction, const QuadConfig& cfg);

// Space-time integral over the flow's intersection with a heat ball. The time
// window is split at its midpoint and both halves are mapped exponentially so
// that the degenerate endpoints (R_r -> 0, and psi_r blowing up when the flow
// passes through the center) land on stretched coordinates. `time_cap`, when
// given, truncates the window from above (used by the smoothed quantities).
struct HeatBallIntegrand {
    std::function<Real(const SliceGeometry&, Real t)> f;
};

QuadResult integrate_heatball(const AncientFlow& flow, const HeatBall& hb,
                              const HeatBallIntegrand& integrand, const QuadConfig& cfg,
                              std::optional<Real> time_cap = std::nullopt);

// Area of M_t intersected with B_R(center). Throws QuadratureError with
// diagnostics when the quadrature does not converge.
Real hausdorff_mass(const AncientFlow& flow, Real t, const AmbientVec& center, Real R,
                    const QuadConfig& cfg);

} // namespace mcf
