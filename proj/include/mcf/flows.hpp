#pragma once

#include "mcf/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mcf {

// A chart piece is one smooth parameter interval of a time-slice. Curve flows
// parametrize the slice directly; rotationally symmetric flows parametrize the
// profile curve (rho(s), z(s)) in the half-plane spanned by a radial direction
// and the symmetry axis. Pieces may depend on t (the Angenent oval switches
// parametrizations once its slices become long).
struct ChartPiece {
    int id = 0;
    Real lo = 0;
    Real hi = 0;
    bool unbounded_lo = false;
    bool unbounded_hi = false;
    bool periodic = false;
};

enum class ChartKind { curve, rotsym };

struct CurveJet {
    AmbientVec x, d1, d2;
};

struct ProfileJet {
    Real rho = 0, z = 0;
    Real drho = 0, dz = 0;
    Real d2rho = 0, d2z = 0;
};

// Orthonormal frame of a surface of revolution: axis through `base`, radial
// directions e1, e2. position(s, phi) = base + rho(s)(cos phi e1 + sin phi e2) + z(s) axis.
struct RotFrame {
    AmbientVec base, axis, e1, e2;
};

struct SliceGeometry {
    AmbientVec x;      // position in R^N
    TangentMat tangent; // N x k first derivatives
    AmbientVec H;      // mean curvature vector
    Real area_density = 0; // sqrt(det g) per parameter volume
    int k = 1;
    SmallMat metric_inv; // k x k

    AmbientVec tangential(const AmbientVec& v) const
    {
        return tangent * (metric_inv * (tangent.transpose() * v));
    }
    AmbientVec normal_part(const AmbientVec& v) const { return v - tangential(v); }
    Matrix tangential_projector() const
    {
        return Matrix(tangent * metric_inv * tangent.transpose());
    }
    Matrix normal_projector() const
    {
        const auto n = tangent.rows();
        return Matrix(Matrix::Identity(n, n) - tangential_projector());
    }
};

// Search region for entropy maximization: x0 = base + span(directions).
struct EntropySearchSpace {
    AmbientVec base;
    std::vector<AmbientVec> directions;
};

class AncientFlow {
public:
    virtual ~AncientFlow() = default;

    virtual std::string name() const = 0;
    virtual int intrinsic_dim() const = 0; // n
    virtual int ambient_dim() const = 0;   // N
    virtual ChartKind chart_kind() const = 0;
    virtual std::vector<ChartPiece> chart_pieces(Real t) const = 0;

    // Curve flows only.
    virtual void curve_jet(int piece, Real w, Real t, CurveJet& out) const;
    // Rotationally symmetric flows only.
    virtual void profile_jet(int piece, Real s, Real t, ProfileJet& out) const;
    virtual RotFrame frame(Real t) const;

    // Finite parameter window guaranteed to contain every chart point whose
    // image lies in the ball B_R(c); may overshoot, never undershoots. For the
    // rotsym case c is given as (rho_c, z_c) in profile coordinates.
    virtual Interval param_outer_bound(int piece, Real t, const AmbientVec& c, Real R) const = 0;

    // Closed-form mean curvature where the catalog entry has one.
    virtual std::optional<AmbientVec> closed_form_mean_curvature(int piece, Real u0, Real u1,
                                                                 Real t) const;

    virtual bool is_self_shrinker() const { return false; }
    virtual std::optional<AmbientVec> translator_direction() const { return std::nullopt; }
    virtual bool reaches_origin_at_zero() const { return false; }

    virtual EntropySearchSpace entropy_search_space(Real t) const;
};

using FlowPtr = std::shared_ptr<const AncientFlow>;

// Geometry assembly from analytic jets. u1 is the azimuth for rotsym flows and
// ignored for curves.
SliceGeometry evaluate_geometry(const AncientFlow& flow, int piece, Real u0, Real u1, Real t);
inline SliceGeometry evaluate_geometry(const AncientFlow& flow, int piece, Real u, Real t)
{
    return evaluate_geometry(flow, piece, u, 0.0, t);
}

struct BallRestriction {
    struct Segment {
        int piece = 0;
        Real lo = 0, hi = 0;
    };
    std::vector<Segment> segments;
    AmbientVec center;
    Real radius = 0;
    Real min_distance = 0; // estimated min |x - center| over the slice

    bool empty() const { return segments.empty(); }
};

// Parameter sub-domains whose image lies inside B_R(center), bracketed by
// scan + bisection on each chart piece.
BallRestriction restrict_to_ball(const AncientFlow& flow, Real t, const AmbientVec& center,
                                 Real R);

std::vector<FlowPtr> catalog();
FlowPtr find_flow(const std::string& name);

// M^r = r^{-1} M_{r^2 t}
FlowPtr parabolic_rescale(FlowPtr flow, Real r);
// M'_t = M_{t + t0} - x0
FlowPtr recenter(FlowPtr flow, const AmbientVec& x0, Real t0);
// M'_t = M_t + v (spatial shift only)
FlowPtr translate(FlowPtr flow, const AmbientVec& v);

} // namespace mcf
