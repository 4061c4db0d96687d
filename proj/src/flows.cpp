#include "mcf/flows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcf {

void AncientFlow::curve_jet(int, Real, Real, CurveJet&) const
{
    throw std::logic_error(name() + ": not a curve flow");
}

void AncientFlow::profile_jet(int, Real, Real, ProfileJet&) const
{
    throw std::logic_error(name() + ": not rotationally symmetric");
}

RotFrame AncientFlow::frame(Real) const
{
    throw std::logic_error(name() + ": not rotationally symmetric");
}

std::optional<AmbientVec> AncientFlow::closed_form_mean_curvature(int, Real, Real, Real) const
{
    return std::nullopt;
}

EntropySearchSpace AncientFlow::entropy_search_space(Real) const
{
    EntropySearchSpace sp;
    sp.base = zero_vec(ambient_dim());
    for (int i = 0; i < ambient_dim(); ++i) {
        AmbientVec e = zero_vec(ambient_dim());
        e[i] = 1;
        sp.directions.push_back(e);
    }
    return sp;
}

// ---- geometry assembly ------------------------------------------------------

SliceGeometry evaluate_geometry(const AncientFlow& flow, int piece, Real u0, Real u1, Real t)
{
    SliceGeometry g;
    if (flow.chart_kind() == ChartKind::curve) {
        CurveJet j;
        flow.curve_jet(piece, u0, t, j);
        g.x = j.x;
        g.k = 1;
        g.tangent.resize(j.x.size(), 1);
        g.tangent.col(0) = j.d1;
        const Real g11 = j.d1.squaredNorm();
        g.metric_inv.resize(1, 1);
        g.metric_inv(0, 0) = 1 / g11;
        g.area_density = std::sqrt(g11);
        const AmbientVec tang = (j.d2.dot(j.d1) / g11) * j.d1;
        g.H = (j.d2 - tang) / g11;
        return g;
    }

    ProfileJet pj;
    flow.profile_jet(piece, u0, t, pj);
    const RotFrame fr = flow.frame(t);
    const Real c = std::cos(u1), s = std::sin(u1);
    const AmbientVec er = c * fr.e1 + s * fr.e2;
    const AmbientVec ephi = -s * fr.e1 + c * fr.e2;

    g.x = fr.base + pj.rho * er + pj.z * fr.axis;
    g.k = 2;
    const AmbientVec xs = pj.drho * er + pj.dz * fr.axis;
    const AmbientVec xphi = pj.rho * ephi;
    g.tangent.resize(g.x.size(), 2);
    g.tangent.col(0) = xs;
    g.tangent.col(1) = xphi;

    const Real g11 = pj.drho * pj.drho + pj.dz * pj.dz;
    const Real g22 = pj.rho * pj.rho; // g12 = 0 by construction
    g.metric_inv.resize(2, 2);
    g.metric_inv.setZero();
    g.metric_inv(0, 0) = 1 / g11;
    g.metric_inv(1, 1) = g22 > 0 ? 1 / g22 : 0;
    g.area_density = std::abs(pj.rho) * std::sqrt(g11);

    const AmbientVec xss = pj.d2rho * er + pj.d2z * fr.axis;
    const AmbientVec xphiphi = -pj.rho * er;
    AmbientVec v = xss / g11;
    if (g22 > 0)
        v += xphiphi / g22;
    // normal part; x_phi is orthogonal to er and axis, so only xs matters here
    g.H = v - (v.dot(xs) / g11) * xs - (g22 > 0 ? (v.dot(xphi) / g22) * xphi : AmbientVec::Zero(g.x.size()).eval());
    return g;
}

// ---- ball restriction -------------------------------------------------------

namespace {

Real profile_distance_sq(const AncientFlow& flow, int piece, Real s, Real t, Real rho_c, Real z_c)
{
    ProfileJet pj;
    flow.profile_jet(piece, s, t, pj);
    const Real dr = pj.rho - rho_c;
    const Real dz = pj.z - z_c;
    return dr * dr + dz * dz;
}

Real curve_distance_sq(const AncientFlow& flow, int piece, Real w, Real t, const AmbientVec& c)
{
    CurveJet j;
    flow.curve_jet(piece, w, t, j);
    return (j.x - c).squaredNorm();
}

} // namespace

BallRestriction restrict_to_ball(const AncientFlow& flow, Real t, const AmbientVec& center,
                                 Real R)
{
    BallRestriction rest;
    rest.center = center;
    rest.radius = R;
    rest.min_distance = std::numeric_limits<Real>::infinity();
    if (!(R > 0))
        return rest;

    const bool rotsym = flow.chart_kind() == ChartKind::rotsym;
    Real rho_c = 0, z_c = 0;
    if (rotsym) {
        const RotFrame fr = flow.frame(t);
        const AmbientVec rel = center - fr.base;
        z_c = rel.dot(fr.axis);
        rho_c = (rel - z_c * fr.axis).norm();
    }
    auto dist_sq = [&](int piece, Real w) {
        return rotsym ? profile_distance_sq(flow, piece, w, t, rho_c, z_c)
                      : curve_distance_sq(flow, piece, w, t, center);
    };

    for (const ChartPiece& piece : flow.chart_pieces(t)) {
        Interval window = flow.param_outer_bound(piece.id, t, center, R);
        window.lo = std::max(window.lo, piece.lo);
        window.hi = std::min(window.hi, piece.hi);
        if (window.empty())
            continue;

        // dense oval charts get a finer seed grid; see AngenentOvalFlow
        const int cells = piece.id >= 100 ? 4096 : 512;
        const Real h = window.length() / cells;
        std::vector<Real> val(cells + 1);
        for (int i = 0; i <= cells; ++i)
            val[i] = dist_sq(piece.id, window.lo + i * h) - R * R;
        for (int i = 0; i <= cells; ++i)
            rest.min_distance =
                std::min(rest.min_distance, std::sqrt(std::max(val[i] + R * R, Real(0))));

        auto bisect = [&](Real a, Real b, Real fa) {
            // root of dist_sq - R^2 in [a, b] with a sign change
            for (int it = 0; it < 90; ++it) {
                const Real m = Real(0.5) * (a + b);
                if (!(a < m && m < b))
                    break;
                const Real fm = dist_sq(piece.id, m) - R * R;
                if ((fm < 0) == (fa < 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return Real(0.5) * (a + b);
        };

        bool inside = val[0] < 0;
        Real seg_start = window.lo;
        for (int i = 0; i < cells; ++i) {
            const bool next_inside = val[i + 1] < 0;
            if (inside == next_inside)
                continue;
            const Real a = window.lo + i * h;
            const Real b = window.lo + (i + 1) * h;
            const Real crossing = bisect(a, b, val[i]);
            if (inside) {
                rest.segments.push_back({piece.id, seg_start, crossing});
            } else {
                seg_start = crossing;
            }
            inside = next_inside;
        }
        if (inside)
            rest.segments.push_back({piece.id, seg_start, window.hi});
    }
    if (!std::isfinite(rest.min_distance))
        rest.min_distance = 0;
    return rest;
}

// ---- catalog entries --------------------------------------------------------

namespace {

constexpr Real kPi = pi<Real>();

// gd(x) = 2 atan(tanh(x/2)), stable for all x
Real gudermann(Real x)
{
    return 2 * std::atan(std::tanh(Real(0.5) * x));
}

class PlaneFlow final : public AncientFlow {
public:
    PlaneFlow(int n, AmbientVec offset, std::string name)
        : n_(n), offset_(std::move(offset)), name_(std::move(name))
    {
        if (n_ != 1 && n_ != 2)
            throw std::invalid_argument("PlaneFlow supports n = 1 or 2");
    }

    std::string name() const override { return name_; }
    int intrinsic_dim() const override { return n_; }
    int ambient_dim() const override { return n_ + 1; }
    ChartKind chart_kind() const override
    {
        return n_ == 1 ? ChartKind::curve : ChartKind::rotsym;
    }
    std::vector<ChartPiece> chart_pieces(Real) const override
    {
        ChartPiece p;
        if (n_ == 1) {
            p.lo = -1e300;
            p.hi = 1e300;
            p.unbounded_lo = p.unbounded_hi = true;
        } else {
            p.lo = 0;
            p.hi = 1e300;
            p.unbounded_hi = true;
        }
        return {p};
    }
    void curve_jet(int, Real w, Real, CurveJet& out) const override
    {
        out.x = offset_;
        out.x[0] += w;
        out.d1 = zero_vec(2);
        out.d1[0] = 1;
        out.d2 = zero_vec(2);
    }
    void profile_jet(int, Real s, Real, ProfileJet& out) const override
    {
        out = ProfileJet{};
        out.rho = s;
        out.drho = 1;
    }
    RotFrame frame(Real) const override
    {
        RotFrame fr;
        fr.base = offset_;
        fr.axis = vec3(0, 0, 1);
        fr.e1 = vec3(1, 0, 0);
        fr.e2 = vec3(0, 1, 0);
        return fr;
    }
    Interval param_outer_bound(int, Real, const AmbientVec& c, Real R) const override
    {
        const AmbientVec rel = c - offset_;
        if (n_ == 1) {
            const Real p = rel[0];
            return {p - R - 1, p + R + 1};
        }
        const Real rho_c = std::hypot(rel[0], rel[1]);
        return {std::max(Real(0), rho_c - R - 1), rho_c + R + 1};
    }
    std::optional<AmbientVec> closed_form_mean_curvature(int, Real, Real, Real) const override
    {
        return zero_vec(ambient_dim());
    }
    bool is_self_shrinker() const override
    {
        // shrinker iff the plane passes through the origin
        return n_ == 1 ? offset_[1] == 0 : offset_[2] == 0;
    }
    bool reaches_origin_at_zero() const override { return is_self_shrinker(); }
    EntropySearchSpace entropy_search_space(Real) const override
    {
        return {offset_, {}};
    }

private:
    int n_;
    AmbientVec offset_;
    std::string name_;
};

// shrinking circle S^1(sqrt(-2t)) in R^2
class CircleFlow final : public AncientFlow {
public:
    std::string name() const override { return "circle"; }
    int intrinsic_dim() const override { return 1; }
    int ambient_dim() const override { return 2; }
    ChartKind chart_kind() const override { return ChartKind::curve; }
    std::vector<ChartPiece> chart_pieces(Real) const override
    {
        ChartPiece p;
        p.lo = 0;
        p.hi = 2 * kPi;
        p.periodic = true;
        return {p};
    }
    void curve_jet(int, Real w, Real t, CurveJet& out) const override
    {
        const Real R = std::sqrt(-2 * t);
        const Real c = std::cos(w), s = std::sin(w);
        out.x = vec2(R * c, R * s);
        out.d1 = vec2(-R * s, R * c);
        out.d2 = vec2(-R * c, -R * s);
    }
    Interval param_outer_bound(int, Real, const AmbientVec&, Real) const override
    {
        return {0, 2 * kPi};
    }
    std::optional<AmbientVec> closed_form_mean_curvature(int, Real w, Real, Real t) const override
    {
        CurveJet j;
        curve_jet(0, w, t, j);
        return AmbientVec(j.x / (2 * t));
    }
    bool is_self_shrinker() const override { return true; }
    bool reaches_origin_at_zero() const override { return true; }
    EntropySearchSpace entropy_search_space(Real) const override
    {
        return {zero_vec(2), {}};
    }
};

// shrinking sphere S^2(sqrt(-4t)) in R^3
class SphereFlow final : public AncientFlow {
public:
    std::string name() const override { return "sphere2"; }
    int intrinsic_dim() const override { return 2; }
    int ambient_dim() const override { return 3; }
    ChartKind chart_kind() const override { return ChartKind::rotsym; }
    std::vector<ChartPiece> chart_pieces(Real) const override
    {
        ChartPiece p;
        p.lo = 0;
        p.hi = kPi;
        return {p};
    }
    void profile_jet(int, Real s, Real t, ProfileJet& out) const override
    {
        const Real R = std::sqrt(-4 * t);
        out.rho = R * std::sin(s);
        out.z = R * std::cos(s);
        out.drho = R * std::cos(s);
        out.dz = -R * std::sin(s);
        out.d2rho = -R * std::sin(s);
        out.d2z = -R * std::cos(s);
    }
    RotFrame frame(Real) const override
    {
        return {zero_vec(3), vec3(0, 0, 1), vec3(1, 0, 0), vec3(0, 1, 0)};
    }
    Interval param_outer_bound(int, Real, const AmbientVec&, Real) const override
    {
        return {0, kPi};
    }
    std::optional<AmbientVec> closed_form_mean_curvature(int, Real s, Real phi,
                                                         Real t) const override
    {
        ProfileJet pj;
        profile_jet(0, s, t, pj);
        const RotFrame fr = frame(t);
        const AmbientVec er = std::cos(phi) * fr.e1 + std::sin(phi) * fr.e2;
        const AmbientVec x = pj.rho * er + pj.z * fr.axis;
        return AmbientVec(x / (2 * t));
    }
    bool is_self_shrinker() const override { return true; }
    bool reaches_origin_at_zero() const override { return true; }
    EntropySearchSpace entropy_search_space(Real) const override
    {
        return {zero_vec(3), {}};
    }
};

// shrinking cylinder S^1(sqrt(-2t)) x R in R^3
class CylinderFlow final : public AncientFlow {
public:
    std::string name() const override { return "cylinder"; }
    int intrinsic_dim() const override { return 2; }
    int ambient_dim() const override { return 3; }
    ChartKind chart_kind() const override { return ChartKind::rotsym; }
    std::vector<ChartPiece> chart_pieces(Real) const override
    {
        ChartPiece p;
        p.lo = -1e300;
        p.hi = 1e300;
        p.unbounded_lo = p.unbounded_hi = true;
        return {p};
    }
    void profile_jet(int, Real s, Real t, ProfileJet& out) const override
    {
        out = ProfileJet{};
        out.rho = std::sqrt(-2 * t);
        out.z = s;
        out.dz = 1;
    }
    RotFrame frame(Real) const override
    {
        return {zero_vec(3), vec3(0, 0, 1), vec3(1, 0, 0), vec3(0, 1, 0)};
    }
    Interval param_outer_bound(int, Real t, const AmbientVec& c, Real R) const override
    {
        const Real z_c = c.size() == 3 ? c[2] : 0;
        (void)t;
        return {z_c - R - 1, z_c + R + 1};
    }
    std::optional<AmbientVec> closed_form_mean_curvature(int, Real s, Real phi,
                                                         Real t) const override
    {
        const RotFrame fr = frame(t);
        const AmbientVec er = std::cos(phi) * fr.e1 + std::sin(phi) * fr.e2;
        const Real R = std::sqrt(-2 * t);
        (void)s;
        return AmbientVec(-er / R);
    }
    bool is_self_shrinker() const override { return true; }
    bool reaches_origin_at_zero() const override { return true; }
    EntropySearchSpace entropy_search_space(Real) const override
    {
        return {zero_vec(3), {}};
    }
};

// grim reaper y = -log cos x + t, arc-length chart (gd(w), log cosh w + t)
class GrimReaperFlow final : public AncientFlow {
public:
    std::string name() const override { return "grim_reaper"; }
    int intrinsic_dim() const override { return 1; }
    int ambient_dim() const override { return 2; }
    ChartKind chart_kind() const override { return ChartKind::curve; }
    std::vector<ChartPiece> chart_pieces(Real) const override
    {
        ChartPiece p;
        p.lo = -1e300;
        p.hi = 1e300;
        p.unbounded_lo = p.unbounded_hi = true;
        return {p};
    }
    void curve_jet(int, Real w, Real t, CurveJet& out) const override
    {
        const Real sech = 1 / std::cosh(w);
        const Real th = std::tanh(w);
        out.x = vec2(gudermann(w), log_cosh(w) + t);
        out.d1 = vec2(sech, th);
        out.d2 = vec2(-sech * th, sech * sech);
    }
    Interval param_outer_bound(int, Real t, const AmbientVec& c, Real R) const override
    {
        // |y - c_y| <= R forces log cosh w <= c_y - t + R
        const Real w_hi = c[1] - t + R;
        if (w_hi < 0)
            return {0, 0};
        const Real wmax = w_hi < 30 ? std::acosh(std::exp(w_hi)) : w_hi + Real(0.6931471805599453);
        return {-wmax - 1, wmax + 1};
    }
    std::optional<AmbientVec> closed_form_mean_curvature(int, Real w, Real, Real) const override
    {
        const Real sech = 1 / std::cosh(w);
        return vec2(-sech * std::tanh(w), sech * sech);
    }
    std::optional<AmbientVec> translator_direction() const override { return vec2(0, 1); }
    bool reaches_origin_at_zero() const override { return true; }
    EntropySearchSpace entropy_search_space(Real t) const override
    {
        return {vec2(0, t), {vec2(0, 1)}};
    }
};

// bowl soliton: rotational translator graph z = u(rho) + t in R^3, n = 2
class BowlFlow final : public AncientFlow {
public:
    BowlFlow()
    {
        build_profile();
    }

    std::string name() const override { return "bowl"; }
    int intrinsic_dim() const override { return 2; }
    int ambient_dim() const override { return 3; }
    ChartKind chart_kind() const override { return ChartKind::rotsym; }
    std::vector<ChartPiece> chart_pieces(Real) const override
    {
        ChartPiece p;
        p.lo = 0;
        p.hi = 1e300;
        p.unbounded_hi = true;
        return {p};
    }
    void profile_jet(int, Real s, Real t, ProfileJet& out) const override
    {
        out.rho = s;
        out.drho = 1;
        out.d2rho = 0;
        profile(s, out.z, out.dz, out.d2z);
        out.z += t;
    }
    RotFrame frame(Real) const override
    {
        return {zero_vec(3), vec3(0, 0, 1), vec3(1, 0, 0), vec3(0, 1, 0)};
    }
    Interval param_outer_bound(int, Real, const AmbientVec& c, Real R) const override
    {
        const Real rho_c = std::hypot(c[0], c[1]);
        return {std::max(Real(0), rho_c - R - 1), rho_c + R + 1};
    }
    std::optional<AmbientVec> closed_form_mean_curvature(int, Real s, Real phi,
                                                         Real t) const override
    {
        // translator identity H = v^perp with v = e3
        Real u, du, d2u;
        profile(s, u, du, d2u);
        (void)t;
        const RotFrame fr = frame(t);
        const AmbientVec er = std::cos(phi) * fr.e1 + std::sin(phi) * fr.e2;
        const AmbientVec nhat = (fr.axis - du * er) / std::sqrt(1 + du * du);
        return AmbientVec(nhat / std::sqrt(1 + du * du));
    }
    std::optional<AmbientVec> translator_direction() const override { return vec3(0, 0, 1); }
    bool reaches_origin_at_zero() const override { return true; }
    EntropySearchSpace entropy_search_space(Real t) const override
    {
        return {vec3(0, 0, t), {vec3(0, 0, 1)}};
    }

    void profile(Real s, Real& u, Real& du, Real& d2u) const
    {
        if (s < kStep) {
            // series at the rotation axis: u = s^2/4 + s^4/128 + O(s^6), n = 2
            u = s * s / 4 + s * s * s * s / 128;
            du = s / 2 + s * s * s / 32;
            d2u = Real(0.5) + 3 * s * s / 32;
            return;
        }
        if (s >= kSMax) {
            // far-field expansion u = s^2/2 - log s + C + 1/s^2
            const Real s2 = s * s;
            u = s2 / 2 - std::log(s) + far_c_ + 1 / s2;
            du = s - 1 / s - 2 / (s2 * s);
            d2u = 1 + 1 / s2 + 6 / (s2 * s2);
            return;
        }
        const Real x = s / kStep;
        const size_t i = std::min(static_cast<size_t>(x), nodes_u_.size() - 2);
        const Real w = x - static_cast<Real>(i);
        // Hermite cubic on the cached RK4 grid
        const Real u0 = nodes_u_[i], u1 = nodes_u_[i + 1];
        const Real m0 = nodes_du_[i] * kStep, m1 = nodes_du_[i + 1] * kStep;
        const Real w2 = w * w, w3 = w2 * w;
        u = (2 * w3 - 3 * w2 + 1) * u0 + (w3 - 2 * w2 + w) * m0 + (-2 * w3 + 3 * w2) * u1 +
            (w3 - w2) * m1;
        du = ((6 * w2 - 6 * w) * u0 + (3 * w2 - 4 * w + 1) * m0 + (-6 * w2 + 6 * w) * u1 +
              (3 * w2 - 2 * w) * m1) /
             kStep;
        d2u = rhs(s, du);
    }

private:
    static constexpr Real kStep = 1.0 / 1024.0;
    static constexpr Real kSMax = 512.0;

    static Real rhs(Real s, Real w)
    {
        // u'' = (1 - u'/s)(1 + u'^2) for the n = 2 translator profile
        return (1 - w / s) * (1 + w * w);
    }

    void build_profile()
    {
        const size_t count = static_cast<size_t>(kSMax / kStep) + 1;
        nodes_u_.resize(count);
        nodes_du_.resize(count);
        nodes_u_[0] = 0;
        nodes_du_[0] = 0;
        // first step from the series, then classic RK4
        Real s = kStep;
        Real u = s * s / 4 + s * s * s * s / 128;
        Real w = s / 2 + s * s * s / 32;
        nodes_u_[1] = u;
        nodes_du_[1] = w;
        for (size_t i = 1; i + 1 < count; ++i) {
            const Real h = kStep;
            const Real k1u = w, k1w = rhs(s, w);
            const Real k2u = w + h / 2 * k1w, k2w = rhs(s + h / 2, w + h / 2 * k1w);
            const Real k3u = w + h / 2 * k2w, k3w = rhs(s + h / 2, w + h / 2 * k2w);
            const Real k4u = w + h * k3w, k4w = rhs(s + h, w + h * k3w);
            u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
            w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
            s += h;
            nodes_u_[i + 1] = u;
            nodes_du_[i + 1] = w;
        }
        const Real sm = kSMax;
        far_c_ = nodes_u_.back() - (sm * sm / 2 - std::log(sm) + 1 / (sm * sm));
    }

    std::vector<Real> nodes_u_, nodes_du_;
    Real far_c_ = 0;
};

// Angenent oval (paperclip): cos x = e^t cosh y, parametrized in closed form by
// the normal angle, x = arcsin(m cos v), y = asinh(m e^{-t} sin v) with
// m^2 = 1 - e^{2t}. Once the slices become long the single chart compresses the
// straight sides into exponentially small parameter windows, so it is split
// into two wing charts parametrized by height and two cap charts.
class AngenentOvalFlow final : public AncientFlow {
public:
    std::string name() const override { return "angenent_oval"; }
    int intrinsic_dim() const override { return 1; }
    int ambient_dim() const override { return 2; }
    ChartKind chart_kind() const override { return ChartKind::curve; }

    // piece ids: 100 single closed chart; 101/102 right/left wing (by height);
    // 103/104 top/bottom cap (by normal angle)
    std::vector<ChartPiece> chart_pieces(Real t) const override
    {
        const Params p = params(t);
        if (!p.split) {
            ChartPiece c;
            c.id = 100;
            c.lo = 0;
            c.hi = 2 * kPi;
            c.periodic = true;
            return {c};
        }
        ChartPiece wing_r{101, -p.psi_c, p.psi_c};
        ChartPiece wing_l{102, -p.psi_c, p.psi_c};
        ChartPiece cap_t{103, p.nu_c, kPi - p.nu_c};
        ChartPiece cap_b{104, p.nu_c, kPi - p.nu_c};
        return {wing_r, cap_t, wing_l, cap_b};
    }

    void curve_jet(int piece, Real w, Real t, CurveJet& out) const override
    {
        const Params p = params(t);
        switch (piece) {
        case 100:
        case 103:
        case 104: {
            const Real sign_y = piece == 104 ? -1 : 1;
            const Real c = std::cos(w), s = std::sin(w);
            const Real q = std::sqrt(p.e2t + p.m2 * s * s);
            const Real x = std::asin(p.m * c);
            const Real ay = asinh_scaled_exp(-t, p.m * std::abs(s));
            const Real y = s >= 0 ? ay : -ay;
            out.x = vec2(x, sign_y * y);
            out.d1 = vec2(-p.m * s / q, sign_y * p.m * c / q);
            const Real q3 = q * q * q;
            out.d2 = vec2(-p.m * c * p.e2t / q3, sign_y * (-p.m * s * (p.e2t + p.m2) / q3));
            return;
        }
        case 101:
        case 102: {
            const Real sign_x = piece == 101 ? 1 : -1;
            const Real E = w >= 0 ? std::exp(t + log_sinh(std::max(w, Real(1e-300))))
                                  : -std::exp(t + log_sinh(std::max(-w, Real(1e-300))));
            const Real F = std::exp(t + log_cosh(w));
            const Real Q = std::sqrt(std::max(p.m2 - E * E, Real(0)));
            out.x = vec2(sign_x * std::asin(Q), w);
            out.d1 = vec2(sign_x * (-E / Q), 1);
            out.d2 = vec2(sign_x * (-p.m2 * F / (Q * Q * Q)), 0);
            return;
        }
        default:
            throw std::logic_error("angenent_oval: unknown chart piece");
        }
    }

    Interval param_outer_bound(int piece, Real t, const AmbientVec& c, Real R) const override
    {
        const Params p = params(t);
        switch (piece) {
        case 100:
            return {0, 2 * kPi};
        case 101:
        case 102:
            return {c[1] - R - Real(0.1), c[1] + R + Real(0.1)};
        case 103:
        case 104:
            return {p.nu_c, kPi - p.nu_c};
        default:
            return {0, 0};
        }
    }

    bool reaches_origin_at_zero() const override { return true; }
    EntropySearchSpace entropy_search_space(Real) const override
    {
        return {zero_vec(2), {vec2(0, 1)}};
    }

private:
    struct Params {
        Real m2, m, e2t;
        bool split;
        Real psi_c = 0, nu_c = 0;
    };

    Params params(Real t) const
    {
        Params p;
        p.m2 = -std::expm1(2 * t);
        p.m = std::sqrt(p.m2);
        p.e2t = std::exp(2 * t);
        const Real big_psi = asinh_scaled_exp(-t, p.m); // height of the slice
        p.split = big_psi > Real(6.5);
        if (p.split) {
            p.psi_c = big_psi - 4;
            // sin(nu_c) = e^t sinh(psi_c) / m
            const Real sn = std::exp(t + log_sinh(p.psi_c)) / p.m;
            p.nu_c = std::asin(std::min(sn, Real(1)));
        }
        return p;
    }
};

} // namespace

// ---- transforms --------------------------------------------------------------

namespace {

class RescaledFlow final : public AncientFlow {
public:
    RescaledFlow(FlowPtr base, Real a) : base_(std::move(base)), a_(a)
    {
        if (!(a_ > 0))
            throw std::domain_error("parabolic_rescale requires r > 0");
    }
    std::string name() const override { return base_->name() + "_rescaled"; }
    int intrinsic_dim() const override { return base_->intrinsic_dim(); }
    int ambient_dim() const override { return base_->ambient_dim(); }
    ChartKind chart_kind() const override { return base_->chart_kind(); }
    std::vector<ChartPiece> chart_pieces(Real t) const override
    {
        return base_->chart_pieces(a_ * a_ * t);
    }
    void curve_jet(int piece, Real w, Real t, CurveJet& out) const override
    {
        base_->curve_jet(piece, w, a_ * a_ * t, out);
        out.x /= a_;
        out.d1 /= a_;
        out.d2 /= a_;
    }
    void profile_jet(int piece, Real s, Real t, ProfileJet& out) const override
    {
        base_->profile_jet(piece, s, a_ * a_ * t, out);
        out.rho /= a_;
        out.z /= a_;
        out.drho /= a_;
        out.dz /= a_;
        out.d2rho /= a_;
        out.d2z /= a_;
    }
    RotFrame frame(Real t) const override
    {
        RotFrame fr = base_->frame(a_ * a_ * t);
        fr.base /= a_;
        return fr;
    }
    Interval param_outer_bound(int piece, Real t, const AmbientVec& c, Real R) const override
    {
        return base_->param_outer_bound(piece, a_ * a_ * t, AmbientVec(a_ * c), a_ * R);
    }
    std::optional<AmbientVec> closed_form_mean_curvature(int piece, Real u0, Real u1,
                                                         Real t) const override
    {
        auto H = base_->closed_form_mean_curvature(piece, u0, u1, a_ * a_ * t);
        if (!H)
            return std::nullopt;
        return AmbientVec(*H * a_);
    }
    bool is_self_shrinker() const override { return base_->is_self_shrinker(); }
    bool reaches_origin_at_zero() const override { return base_->reaches_origin_at_zero(); }
    EntropySearchSpace entropy_search_space(Real t) const override
    {
        EntropySearchSpace sp = base_->entropy_search_space(a_ * a_ * t);
        sp.base /= a_;
        return sp;
    }

private:
    FlowPtr base_;
    Real a_;
};

class RecenteredFlow final : public AncientFlow {
public:
    RecenteredFlow(FlowPtr base, AmbientVec x0, Real t0)
        : base_(std::move(base)), x0_(std::move(x0)), t0_(t0)
    {
    }
    std::string name() const override { return base_->name() + "_recentered"; }
    int intrinsic_dim() const override { return base_->intrinsic_dim(); }
    int ambient_dim() const override { return base_->ambient_dim(); }
    ChartKind chart_kind() const override { return base_->chart_kind(); }
    std::vector<ChartPiece> chart_pieces(Real t) const override
    {
        return base_->chart_pieces(t + t0_);
    }
    void curve_jet(int piece, Real w, Real t, CurveJet& out) const override
    {
        base_->curve_jet(piece, w, t + t0_, out);
        out.x -= x0_;
    }
    void profile_jet(int piece, Real s, Real t, ProfileJet& out) const override
    {
        base_->profile_jet(piece, s, t + t0_, out);
    }
    RotFrame frame(Real t) const override
    {
        RotFrame fr = base_->frame(t + t0_);
        fr.base -= x0_;
        return fr;
    }
    Interval param_outer_bound(int piece, Real t, const AmbientVec& c, Real R) const override
    {
        return base_->param_outer_bound(piece, t + t0_, AmbientVec(c + x0_), R);
    }
    std::optional<AmbientVec> closed_form_mean_curvature(int piece, Real u0, Real u1,
                                                         Real t) const override
    {
        return base_->closed_form_mean_curvature(piece, u0, u1, t + t0_);
    }
    bool is_self_shrinker() const override
    {
        return base_->is_self_shrinker() && t0_ == 0 && x0_.isZero();
    }
    std::optional<AmbientVec> translator_direction() const override
    {
        return base_->translator_direction();
    }
    bool reaches_origin_at_zero() const override
    {
        return base_->reaches_origin_at_zero() && t0_ == 0 && x0_.isZero();
    }
    EntropySearchSpace entropy_search_space(Real t) const override
    {
        EntropySearchSpace sp = base_->entropy_search_space(t + t0_);
        sp.base -= x0_;
        return sp;
    }

private:
    FlowPtr base_;
    AmbientVec x0_;
    Real t0_;
};

} // namespace

FlowPtr parabolic_rescale(FlowPtr flow, Real r)
{
    if (r == 1)
        return flow;
    return std::make_shared<RescaledFlow>(std::move(flow), r);
}

FlowPtr recenter(FlowPtr flow, const AmbientVec& x0, Real t0)
{
    if (x0.isZero() && t0 == 0)
        return flow;
    return std::make_shared<RecenteredFlow>(std::move(flow), x0, t0);
}

FlowPtr translate(FlowPtr flow, const AmbientVec& v)
{
    return recenter(std::move(flow), AmbientVec(-v), 0);
}

std::vector<FlowPtr> catalog()
{
    static const std::vector<FlowPtr> entries = [] {
        std::vector<FlowPtr> fs;
        fs.push_back(std::make_shared<PlaneFlow>(1, vec2(0, 0), "line"));
        fs.push_back(std::make_shared<PlaneFlow>(2, vec3(0, 0, 0), "plane"));
        fs.push_back(std::make_shared<PlaneFlow>(2, vec3(0, 0, 1), "plane_shifted"));
        fs.push_back(std::make_shared<CircleFlow>());
        fs.push_back(std::make_shared<SphereFlow>());
        fs.push_back(std::make_shared<CylinderFlow>());
        fs.push_back(std::make_shared<GrimReaperFlow>());
        fs.push_back(std::make_shared<BowlFlow>());
        fs.push_back(std::make_shared<AngenentOvalFlow>());
        return fs;
    }();
    return entries;
}

FlowPtr find_flow(const std::string& name)
{
    for (const FlowPtr& f : catalog())
        if (f->name() == name)
            return f;
    throw std::invalid_argument("unknown flow: " + name);
}

} // namespace mcf
