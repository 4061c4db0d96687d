#include "mcf/quad.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace mcf {

namespace {

// Gauss-Kronrod 15-point nodes on [-1, 1] with the embedded 7-point Gauss rule.
constexpr int kGK = 15;
constexpr Real kNodes[kGK] = {
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
};
constexpr Real kWeightsK[kGK] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
};
// Gauss-7 weights at the odd Kronrod nodes (indices 1,3,...,13).
constexpr Real kWeightsG[7] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
};

struct Panel {
    Real a, b;
    Real value, error;
    int depth;
};

struct PanelOrder {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

Panel evaluate_panel(const std::function<Real(Real)>& f, Real a, Real b, int depth, long& evals)
{
    const Real c = Real(0.5) * (a + b);
    const Real h = Real(0.5) * (b - a);
    Real vk = 0, vg = 0;
    for (int i = 0; i < kGK; ++i) {
        const Real fx = f(c + h * kNodes[i]);
        vk += kWeightsK[i] * fx;
        if (i % 2 == 1)
            vg += kWeightsG[i / 2] * fx;
    }
    evals += kGK;
    Panel p;
    p.a = a;
    p.b = b;
    p.value = vk * h;
    p.error = std::abs((vk - vg) * h);
    p.depth = depth;
    return p;
}

} // namespace

QuadResult integrate_adaptive(const std::function<Real(Real)>& f,
                              std::span<const Interval> segments, const QuadConfig& cfg)
{
    QuadResult res;
    std::vector<Panel> heap;
    for (const Interval& seg : segments) {
        if (seg.empty())
            continue;
        heap.push_back(evaluate_panel(f, seg.lo, seg.hi, 0, res.evaluations));
    }
    std::make_heap(heap.begin(), heap.end(), PanelOrder{});

    // sums are recomputed exactly each round: a split that removes a huge
    // spurious panel value would otherwise cancel catastrophically
    Real total = 0, err = 0;
    auto resum = [&] {
        total = 0;
        err = 0;
        for (const Panel& p : heap) {
            total += p.value;
            err += p.error;
        }
    };
    resum();
    auto done = [&] { return err <= std::max(cfg.rel_tol * std::abs(total), cfg.abs_tol); };
    constexpr size_t kMaxPanels = 20000;
    while (!heap.empty() && !done()) {
        const Panel worst = heap.front();
        if (worst.depth >= cfg.max_depth || worst.error == 0 || heap.size() >= kMaxPanels)
            break;
        std::pop_heap(heap.begin(), heap.end(), PanelOrder{});
        heap.pop_back();
        const Real mid = Real(0.5) * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            heap.push_back(worst); // interval at roundoff width
            std::push_heap(heap.begin(), heap.end(), PanelOrder{});
            break;
        }
        heap.push_back(evaluate_panel(f, worst.a, mid, worst.depth + 1, res.evaluations));
        std::push_heap(heap.begin(), heap.end(), PanelOrder{});
        heap.push_back(evaluate_panel(f, mid, worst.b, worst.depth + 1, res.evaluations));
        std::push_heap(heap.begin(), heap.end(), PanelOrder{});
        resum();
    }
    res.value = total;
    res.error_estimate = std::max(err, Real(0));
    res.converged = done();
    return res;
}

QuadResult integrate_adaptive(const std::function<Real(Real)>& f, Real a, Real b,
                              const QuadConfig& cfg)
{
    const Interval seg{a, b};
    return integrate_adaptive(f, std::span<const Interval>(&seg, 1), cfg);
}

LimitEstimate improper_limit(std::span<const Real> values, Real slack)
{
    if (values.size() < 3)
        throw std::invalid_argument("improper_limit requires at least 3 schedule points");
    LimitEstimate est;
    const size_t m = values.size();
    est.last_value = values[m - 1];
    est.tail_diff = std::abs(values[m - 1] - values[m - 2]);

    // direction from the total change; violations measured against it
    const Real span = values[m - 1] - values[0];
    const Real dir = span >= 0 ? 1 : -1;
    for (size_t i = 1; i < m; ++i) {
        if (dir * (values[i] - values[i - 1]) < -slack)
            est.monotone = false;
    }

    const Real d_last = values[m - 1] - values[m - 2];
    const Real d_prev = values[m - 2] - values[m - 3];
    est.limit = est.last_value;
    est.error_bar = est.tail_diff;
    if (std::abs(d_prev) > 0) {
        const Real q = d_last / d_prev;
        if (q > 0 && q <= Real(0.95)) {
            const Real correction = d_last * q / (1 - q);
            est.limit = est.last_value + correction;
            est.error_bar = std::abs(correction) + Real(0.25) * est.tail_diff;
        }
    }
    est.converged = est.monotone;
    return est;
}

namespace {

// ---- slice integration -----------------------------------------------------

struct ResolvedDomain {
    std::vector<BallRestriction::Segment> segments;
    bool empty = true;
};

// Truncation ball for a Gaussian-weighted integrand over an unbounded chart:
// weight ratio to the slice maximum falls below delta outside
// |x - c|^2 > d_min^2 + 4|tau| log(1/delta).
BallRestriction gaussian_truncation(const AncientFlow& flow, Real t, const AmbientVec& center,
                                    Real tau, Real delta)
{
    const Real L = std::log(1 / delta);
    Real R = std::sqrt(4 * std::abs(tau) * L);
    BallRestriction rest;
    for (int iter = 0; iter < 64; ++iter) {
        rest = restrict_to_ball(flow, t, center, R);
        if (rest.empty()) {
            R *= 2;
            continue;
        }
        const Real d = rest.min_distance;
        const Real R_needed = std::sqrt(d * d + 4 * std::abs(tau) * L);
        if (R_needed <= R * (1 + 1e-9))
            return restrict_to_ball(flow, t, center, R_needed);
        R = R_needed * Real(1.0625);
    }
    return rest;
}

ResolvedDomain resolve_domain(const AncientFlow& flow, Real t, const SliceIntegrand& integrand,
                              const BallRestriction* restriction, const QuadConfig& cfg,
                              BallRestriction& storage)
{
    ResolvedDomain dom;
    if (restriction) {
        dom.segments = restriction->segments;
        dom.empty = dom.segments.empty();
        return dom;
    }
    const auto pieces = flow.chart_pieces(t);
    bool unbounded = false;
    for (const auto& p : pieces)
        unbounded = unbounded || p.unbounded_lo || p.unbounded_hi;
    if (!unbounded) {
        for (const auto& p : pieces)
            dom.segments.push_back({p.id, p.lo, p.hi});
        dom.empty = dom.segments.empty();
        return dom;
    }
    if (!integrand.center || !integrand.gaussian_tau)
        throw std::invalid_argument(
            "integrate_slice: unbounded chart needs a ball restriction or a Gaussian weight");
    storage = gaussian_truncation(flow, t, *integrand.center, *integrand.gaussian_tau,
                                  cfg.trunc_delta);
    dom.segments = storage.segments;
    dom.empty = dom.segments.empty();
    return dom;
}

// Azimuth arc {phi : |x(s, phi) - c| <= R} as a half-width around the azimuth
// of c; full circle when the whole orbit fits.
struct AzimuthArc {
    Real center = 0;
    Real half_width = 0;
    bool full = false;
    bool empty = false;
};

AzimuthArc azimuth_arc(Real rho, Real z, Real rho_c, Real z_c, Real phi_c, Real R)
{
    AzimuthArc arc;
    arc.center = phi_c;
    const Real dz2 = (z - z_c) * (z - z_c);
    if (rho <= 0 || rho_c <= 0) {
        const Real d2 = (rho - rho_c) * (rho - rho_c) + dz2;
        if (d2 <= R * R)
            arc.full = true;
        else
            arc.empty = true;
        return arc;
    }
    const Real cosv = (rho * rho + rho_c * rho_c + dz2 - R * R) / (2 * rho * rho_c);
    if (cosv <= -1) {
        arc.full = true;
    } else if (cosv >= 1) {
        arc.empty = true;
    } else {
        arc.half_width = std::acos(cosv);
    }
    return arc;
}

} // namespace

QuadResult integrate_slice(const AncientFlow& flow, Real t, const SliceIntegrand& integrand,
                           const BallRestriction* restriction, const QuadConfig& cfg)
{
    BallRestriction storage;
    const ResolvedDomain dom = resolve_domain(flow, t, integrand, restriction, cfg, storage);
    if (dom.empty)
        return QuadResult{};

    QuadResult res;
    res.evaluations = 0;
    if (flow.chart_kind() == ChartKind::curve) {
        QuadResult acc;
        for (const auto& seg : dom.segments) {
            auto f = [&](Real w) {
                const SliceGeometry g = evaluate_geometry(flow, seg.piece, w, t);
                return integrand.f(g) * g.area_density;
            };
            acc += integrate_adaptive(f, seg.lo, seg.hi, cfg);
        }
        return acc;
    }

    // rotationally symmetric
    const RotFrame fr = flow.frame(t);
    AmbientVec center = integrand.center ? *integrand.center
                                         : (restriction ? restriction->center : fr.base);
    const AmbientVec rel = center - fr.base;
    const Real z_c = rel.dot(fr.axis);
    const AmbientVec radial = rel - z_c * fr.axis;
    const Real rho_c = radial.norm();
    const Real scale = 1 + center.norm();
    const bool on_axis = rho_c <= 1e-9 * scale;

    if (on_axis) {
        QuadResult acc;
        for (const auto& seg : dom.segments) {
            auto f = [&](Real s) {
                const SliceGeometry g = evaluate_geometry(flow, seg.piece, s, 0.0, t);
                return integrand.f(g) * g.area_density * 2 * pi<Real>();
            };
            acc += integrate_adaptive(f, seg.lo, seg.hi, cfg);
        }
        return acc;
    }

    // product rule: outer adaptive in s, inner adaptive over the azimuth arc
    const Real phi_c = std::atan2(radial.dot(fr.e2), radial.dot(fr.e1));
    const bool has_ball = restriction != nullptr || !dom.segments.empty();
    const Real ball_R = restriction ? restriction->radius : storage.radius;
    QuadConfig inner_cfg = cfg;
    inner_cfg.rel_tol = std::max(cfg.rel_tol * Real(0.2), Real(1e-13));
    inner_cfg.abs_tol = cfg.abs_tol * Real(0.1);
    QuadResult acc;
    long inner_evals = 0;
    for (const auto& seg : dom.segments) {
        auto f = [&](Real s) {
            ProfileJet pj;
            flow.profile_jet(seg.piece, s, t, pj);
            AzimuthArc arc{0, 0, true, false};
            if (has_ball && ball_R > 0)
                arc = azimuth_arc(pj.rho, pj.z, rho_c, z_c, phi_c, ball_R);
            if (arc.empty)
                return Real(0);
            auto g = [&](Real phi) {
                const SliceGeometry geom = evaluate_geometry(flow, seg.piece, s, phi, t);
                return integrand.f(geom) * geom.area_density;
            };
            QuadResult inner;
            if (arc.full)
                inner = integrate_adaptive(g, phi_c - pi<Real>(), phi_c + pi<Real>(), inner_cfg);
            else
                inner = integrate_adaptive(g, arc.center - arc.half_width,
                                           arc.center + arc.half_width, inner_cfg);
            inner_evals += inner.evaluations;
            return inner.value;
        };
        acc += integrate_adaptive(f, seg.lo, seg.hi, cfg);
    }
    acc.evaluations += inner_evals;
    return acc;
}

QuadResult integrate_heatball(const AncientFlow& flow, const HeatBall& hb,
                              const HeatBallIntegrand& integrand, const QuadConfig& cfg,
                              std::optional<Real> time_cap)
{
    const Real T = hb.r * hb.r / (4 * pi<Real>());
    Real cap = hb.t0; // exclusive upper end of the window
    if (time_cap)
        cap = std::min(cap, *time_cap);
    if (!(cap > hb.t0 - T))
        return QuadResult{};

    QuadConfig outer_cfg = cfg;

    long inner_evals = 0;
    bool inner_converged = true;
    // jacobian-aware inner tolerance: the outer integral only needs the slice
    // value to abs_tol / (jacobian * window length), which keeps roundoff-noise
    // integrands (deficits on self-shrinkers near t -> t0) from demanding
    // refinement that cannot converge
    auto time_value = [&](Real t, Real jacobian) {
        const Real tau = t - hb.t0;
        const Real R = slice_radius(hb.r, tau, hb.n);
        if (!(R > 0))
            return Real(0);
        const BallRestriction rest = restrict_to_ball(flow, t, hb.center, R);
        if (rest.empty())
            return Real(0);
        SliceIntegrand slice;
        slice.center = hb.center;
        slice.gaussian_tau = tau;
        slice.f = [&](const SliceGeometry& g) { return integrand.f(g, t); };
        QuadConfig inner_cfg = cfg;
        inner_cfg.rel_tol = std::max(cfg.rel_tol * Real(0.3), Real(1e-13));
        inner_cfg.abs_tol = std::max(cfg.abs_tol, cfg.abs_tol / (256 * jacobian));
        const QuadResult inner = integrate_slice(flow, t, slice, &rest, inner_cfg);
        inner_evals += inner.evaluations;
        inner_converged = inner_converged && inner.converged;
        return inner.value;
    };

    const Real L = std::log(1 / cfg.trunc_delta);
    QuadResult total;

    // upper half: t = t0 - (T/2) e^{-s} covers (t0 - T/2, cap)
    if (cap > hb.t0 - T / 2) {
        // Signal decays like e^{-n s / 2} while integrand roundoff noise is
        // amplified by 1/tau^2; their crossover sits at
        //   s* = 2/(n+2) (log(T/2) - 2 log eps - n/2 log L),
        // so the tail is cut a safety margin before it.
        const Real log_eps = std::log(Real(1e-16));
        const Real s_star =
            Real(2) / (hb.n + 2) *
            (std::log(T / 2) - 2 * log_eps - Real(0.5) * hb.n * std::log(L));
        Real s_end = std::min(2 * L / hb.n + 8, s_star - 4);
        s_end = std::max(s_end, Real(10));
        if (cap < hb.t0)
            s_end = std::min(s_end, std::log(T / (2 * (hb.t0 - cap))));
        if (s_end > 0) {
            auto f = [&](Real s) {
                const Real t = hb.t0 - (T / 2) * std::exp(-s);
                const Real jac = (T / 2) * std::exp(-s);
                return time_value(t, jac) * jac;
            };
            // pre-split: one panel per unit of s where the flow can reach the
            // center, so the degenerate end is always resolved
            std::vector<Interval> segs;
            const Real step = flow.reaches_origin_at_zero() ? 1.0 : 4.0;
            Real a = 0;
            while (a < s_end) {
                const Real b = std::min(a + step, s_end);
                segs.push_back({a, b});
                a = b;
            }
            total += integrate_adaptive(f, segs, outer_cfg);
        }
    }
    // lower half: t = t0 - T + (T/2) e^{-w} covers (t0 - T, min(cap, t0 - T/2)]
    {
        const Real lo_cap = std::min(cap, hb.t0 - T / 2);
        if (lo_cap > hb.t0 - T) {
            const Real w_start = std::log(T / (2 * (lo_cap - (hb.t0 - T))));
            const Real w_max = L + 12;
            if (w_start < w_max) {
                auto f = [&](Real w) {
                    const Real t = hb.t0 - T + (T / 2) * std::exp(-w);
                    const Real jac = (T / 2) * std::exp(-w);
                    return time_value(t, jac) * jac;
                };
                std::vector<Interval> segs;
                Real a = std::max(w_start, Real(0));
                while (a < w_max) {
                    const Real b = std::min(a + 4, w_max);
                    segs.push_back({a, b});
                    a = b;
                }
                total += integrate_adaptive(f, segs, outer_cfg);
            }
        }
    }
    total.evaluations += inner_evals;
    total.converged = total.converged && inner_converged;
    return total;
}

Real hausdorff_mass(const AncientFlow& flow, Real t, const AmbientVec& center, Real R,
                    const QuadConfig& cfg)
{
    if (!(t < 0))
        throw std::domain_error("hausdorff_mass requires t < 0");
    const BallRestriction rest = restrict_to_ball(flow, t, center, R);
    SliceIntegrand one;
    one.center = center;
    one.f = [](const SliceGeometry&) { return Real(1); };
    const QuadResult res = integrate_slice(flow, t, one, &rest, cfg);
    if (!res.converged)
        throw QuadratureError("hausdorff_mass: quadrature did not converge (flow " + flow.name() +
                                  ", t=" + std::to_string(t) + ", R=" + std::to_string(R) +
                                  ", error=" + std::to_string(res.error_estimate) + ")",
                              res);
    return res.value;
}

} // namespace mcf
