#pragma once

#include "mcf/quad.hpp"

#include <string>
#include <vector>

namespace mcf {

// Space-time center of a quantity; all integrands are evaluated in coordinates
// relative to it.
struct Center {
    AmbientVec x0;
    Real t0 = 0;
};

inline Center origin_center(int N)
{
    return Center{zero_vec(N), 0};
}

enum class QuantityKind { huisken, ecker, deficit_phi, deficit_plain, residual };

struct QuantityReport {
    QuantityKind kind = QuantityKind::huisken;
    Real parameter = 0; // t for huisken, r for ecker and the deficits over E_r
    Center center;
    Real value = 0;
    Real error_estimate = 0;
    long evaluations = 0;
    bool converged = true;
};

std::string to_string(QuantityKind kind);

// Gaussian-weighted area of the time slice, int_{M_t} Phi_{x0,t0} dmu_t.
QuantityReport huisken_integral(const AncientFlow& flow, Real t, const Center& center,
                                const QuadConfig& cfg);

// Heat-ball integral A(M cap E_r) of |grad psi|^2 + |H|^2 psi_r, centered at hb.
QuantityReport ecker_integral(const AncientFlow& flow, const HeatBall& hb,
                              const QuadConfig& cfg);

// int_a^b int_{M_t} |H - grad^perp psi|^2 Phi dmu dt over a finite time window.
QuantityReport deficit_phi(const AncientFlow& flow, Real a, Real b, const Center& center,
                           const QuadConfig& cfg);

// Deficit mass over the heat ball, weighted by Phi or by 1.
QuantityReport deficit_heatball(const AncientFlow& flow, const HeatBall& hb, bool phi_weighted,
                                const QuadConfig& cfg);

// Residual of the finite-r identity
//   A/r^n - Theta(0,0) = II_{E_r} |H-grad^perp psi|^2 Phi - r^{-n} II_{E_r} |H-grad^perp psi|^2
// with all four terms computed independently.
Real finite_radius_identity_residual(const AncientFlow& flow, Real r, const QuadConfig& cfg);

struct DensityResult {
    Real value = 0;
    Real error_bar = 0;
    std::vector<Real> schedule_times;
    std::vector<Real> schedule_values;
    bool converged = true;
};

// Gaussian density Theta(M, x0, t0) as the extrapolated limit of the Huisken
// integral along a geometric approach schedule t -> t0.
DensityResult gaussian_density(const AncientFlow& flow, const Center& center,
                               const QuadConfig& cfg, Real first_offset = 1e-2, int points = 5);

// helper shared with the mollifier module: deficit |H - (x-x0)^perp/(2 tau)|^2
Real deficit_density(const SliceGeometry& g, const Center& center, Real t);

std::string csv_header_quantity();
std::string csv_row(const QuantityReport& report);

} // namespace mcf
