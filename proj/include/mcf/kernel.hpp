#pragma once

#include "mcf/types.hpp"

#include <cmath>
#include <stdexcept>

namespace mcf {

// Backward heat kernel, its log, and heat-ball geometry. All evaluations go
// through log space first; (-4*pi*t)^(-n/2) overflows double precision long
// before the quantities of interest do.

template <class Scalar>
Scalar log_phi(Scalar x_sq, Scalar t, int n)
{
    return x_sq / (4 * t) - Scalar(0.5) * Scalar(n) * std::log(Scalar(-4) * pi<Scalar>() * t);
}

template <class Scalar>
Scalar phi_from_sq(Scalar x_sq, Scalar t, int n)
{
    return std::exp(log_phi(x_sq, t, n));
}

// psi_r = log(phi * r^n)
template <class Scalar>
Scalar psi_r_from_sq(Scalar x_sq, Scalar t, Scalar r, int n)
{
    return log_phi(x_sq, t, n) + Scalar(n) * std::log(r);
}

struct KernelPoint {
    AmbientVec x;
    Real t = -1; // strictly negative
};

struct HeatBall {
    AmbientVec center; // x0
    Real t0 = 0;
    Real r = 1;
    int n = 1; // intrinsic dimension

    Real window_start() const { return t0 - r * r / (4 * pi<Real>()); }
    bool in_window(Real t) const { return t > window_start() && t < t0; }
};

inline void require_negative_time(Real t)
{
    if (!(t < 0))
        throw std::domain_error("backward heat kernel requires t < 0");
}

inline Real phi(const KernelPoint& p, int n)
{
    require_negative_time(p.t);
    return phi_from_sq(p.x.squaredNorm(), p.t, n);
}

inline Real phi_centered(const AmbientVec& x, Real t, const AmbientVec& x0, Real t0, int n)
{
    if (!(t < t0))
        throw std::domain_error("phi_centered requires t < t0");
    return phi_from_sq((x - x0).squaredNorm(), t - t0, n);
}

inline Real psi_r(const KernelPoint& p, Real r, int n)
{
    require_negative_time(p.t);
    if (!(r > 0))
        throw std::domain_error("psi_r requires r > 0");
    return psi_r_from_sq(p.x.squaredNorm(), p.t, r, n);
}

// R_r(t) = sqrt(2 n t log(-4 pi t / r^2)) on the window (-r^2/4pi, 0);
// the closed lower endpoint is accepted and maps to 0.
inline Real slice_radius(Real r, Real t, int n)
{
    if (!(r > 0))
        throw std::domain_error("slice_radius requires r > 0");
    const Real start = -r * r / (4 * pi<Real>());
    if (!(t >= start) || !(t < 0))
        throw std::domain_error("slice_radius: t outside heat-ball window");
    Real arg = 2 * n * t * std::log(-4 * pi<Real>() * t / (r * r));
    if (arg < 0) {
        if (arg < -1e-14)
            throw std::domain_error("slice_radius: negative radicand");
        arg = 0; // endpoint roundoff
    }
    return std::sqrt(arg);
}

inline bool heat_ball_contains(const HeatBall& hb, const AmbientVec& x, Real t)
{
    if (!hb.in_window(t))
        return false;
    const Real R = slice_radius(hb.r, t - hb.t0, hb.n);
    return (x - hb.center).norm() < R;
}

inline Real positive_part(Real x)
{
    return x > 0 ? x : 0;
}

} // namespace mcf
