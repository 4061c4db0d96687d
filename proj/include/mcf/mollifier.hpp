#pragma once

#include "mcf/quad.hpp"

#include <vector>

namespace mcf {

// Smoothed Dirac/Heaviside/ramp triple built from the standard bump
// exp(-1/(y(eps-y))) on (0, eps), normalized to unit mass. zeta and Z are
// cached on a 2048-node cumulative table with Hermite interpolation, clamped
// to their analytic envelopes chi(x-eps) <= zeta <= chi(x) and
// [x-eps]_+ <= Z <= [x]_+.
class MollifierFamily {
public:
    explicit MollifierFamily(Real eps);

    Real epsilon() const { return eps_; }
    Real alpha() const { return alpha_; } // log int e^{-y} eta(y) dy, <= 0

    Real eta(Real x) const;
    Real zeta(Real x) const;
    Real Z(Real x) const;

    // int over r in [lo, hi] of n r^{-n-1} zeta(psi_1 + n log r); hi may be
    // +infinity. Integrated directly in r, independent of the substitution
    // used in the closed-form identity it is tested against.
    Real zeta_radial_integral(Real psi1, int n, Real lo, Real hi) const;

private:
    Real scaled_eta(Real z) const;  // normalized bump on [0, 1]
    Real scaled_zeta(Real z) const; // its CDF on [0, 1]

    Real eps_;
    Real norm_; // 1 / int_0^1 exp(-1/(z(1-z))) dz
    Real alpha_;
    std::vector<Real> cdf_;       // CDF nodes on [0, 1]
    std::vector<Real> eta_nodes_; // normalized bump at the nodes
    std::vector<Real> ramp_;      // int_0^z CDF nodes on [0, 1]
};

MollifierFamily make_mollifier(Real eps);

// A_eps(s, r): smoothed Ecker integral over the truncated track M_s.
QuadResult smoothed_ecker(const AncientFlow& flow, Real r, Real s_cap,
                          const MollifierFamily& fam, const QuadConfig& cfg);

struct SmoothedEckerLimit {
    Real value = 0; // A_eps(r) = lim_{s->0} A_eps(s, r)
    Real error_bar = 0;
    std::vector<Real> schedule_s;
    std::vector<Real> schedule_values;
    bool converged = true;
};

// A_eps(r) via the schedule s = -s0 2^{-k}.
SmoothedEckerLimit smoothed_ecker_limit(const AncientFlow& flow, Real r,
                                        const MollifierFamily& fam, const QuadConfig& cfg,
                                        int points = 25);

// max over samples of |LHS - RHS| / RHS for the radial kernel identity
//   int_0^inf n/r^{n+1} zeta(psi_r) dr = e^alpha Phi.
Real radial_kernel_identity_residual(const MollifierFamily& fam,
                             const std::vector<KernelPoint>& samples, int n);

// E(s; sigma, rho) = int_sigma^rho dr int_{M_s} n/r^{n+1} Z(psi_r) dmu_s.
QuadResult error_term(const AncientFlow& flow, Real s, Real sigma, Real rho,
                      const MollifierFamily& fam, const QuadConfig& cfg);

struct SmoothedMonotonicityReport {
    Real lhs = 0; // A_eps(rho)/rho^n - A_eps(sigma)/sigma^n
    Real rhs = 0; // triple integral of the deficit against the zeta kernel
    Real residual = 0;
    Real lhs_error_bar = 0;
    bool converged = true;
};

SmoothedMonotonicityReport smoothed_monotonicity_check(const AncientFlow& flow, Real sigma,
                                                       Real rho, const MollifierFamily& fam,
                                                       const QuadConfig& cfg);

} // namespace mcf
