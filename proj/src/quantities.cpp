#include "mcf/quantities.hpp"

#include <cmath>
#include <cstdio>

namespace mcf {

std::string to_string(QuantityKind kind)
{
    switch (kind) {
    case QuantityKind::huisken:
        return "huisken";
    case QuantityKind::ecker:
        return "ecker";
    case QuantityKind::deficit_phi:
        return "deficit_phi";
    case QuantityKind::deficit_plain:
        return "deficit_plain";
    case QuantityKind::residual:
        return "residual";
    }
    return "unknown";
}

Real deficit_density(const SliceGeometry& g, const Center& center, Real t)
{
    const Real tau = t - center.t0;
    const AmbientVec rel = g.x - center.x0;
    const AmbientVec diff = g.H - g.normal_part(rel) / (2 * tau);
    return diff.squaredNorm();
}

QuantityReport huisken_integral(const AncientFlow& flow, Real t, const Center& center,
                                const QuadConfig& cfg)
{
    if (!(t < center.t0))
        throw std::domain_error("huisken_integral requires t < t0");
    const int n = flow.intrinsic_dim();
    const Real tau = t - center.t0;
    SliceIntegrand integrand;
    integrand.center = center.x0;
    integrand.gaussian_tau = tau;
    integrand.f = [&, tau, n](const SliceGeometry& g) {
        return phi_from_sq((g.x - center.x0).squaredNorm(), tau, n);
    };
    const QuadResult res = integrate_slice(flow, t, integrand, nullptr, cfg);
    QuantityReport rep;
    rep.kind = QuantityKind::huisken;
    rep.parameter = t;
    rep.center = center;
    rep.value = res.value;
    rep.error_estimate = res.error_estimate;
    rep.evaluations = res.evaluations;
    rep.converged = res.converged;
    return rep;
}

QuantityReport ecker_integral(const AncientFlow& flow, const HeatBall& hb, const QuadConfig& cfg)
{
    const int n = flow.intrinsic_dim();
    HeatBallIntegrand integrand;
    integrand.f = [&, n](const SliceGeometry& g, Real t) {
        const Real tau = t - hb.t0;
        const AmbientVec rel = g.x - hb.center;
        const Real grad_sq = g.tangential(rel).squaredNorm() / (4 * tau * tau);
        const Real psi = psi_r_from_sq(rel.squaredNorm(), tau, hb.r, n);
        return grad_sq + g.H.squaredNorm() * std::max(psi, Real(0));
    };
    const QuadResult res = integrate_heatball(flow, hb, integrand, cfg);
    QuantityReport rep;
    rep.kind = QuantityKind::ecker;
    rep.parameter = hb.r;
    rep.center = {hb.center, hb.t0};
    rep.value = res.value;
    rep.error_estimate = res.error_estimate;
    rep.evaluations = res.evaluations;
    rep.converged = res.converged;
    return rep;
}

QuantityReport deficit_phi(const AncientFlow& flow, Real a, Real b, const Center& center,
                           const QuadConfig& cfg)
{
    if (!(a < b) || !(b <= center.t0))
        throw std::domain_error("deficit_phi requires a < b <= t0");
    const int n = flow.intrinsic_dim();
    QuadConfig inner_cfg = cfg;
    inner_cfg.rel_tol = std::max(cfg.rel_tol * Real(0.3), Real(1e-13));
    long inner_evals = 0;
    bool inner_ok = true;
    auto slice_value = [&](Real t) {
        const Real tau = t - center.t0;
        SliceIntegrand integrand;
        integrand.center = center.x0;
        integrand.gaussian_tau = tau;
        integrand.f = [&, tau, n](const SliceGeometry& g) {
            const Real w = phi_from_sq((g.x - center.x0).squaredNorm(), tau, n);
            return deficit_density(g, center, t) * w;
        };
        const QuadResult r = integrate_slice(flow, t, integrand, nullptr, inner_cfg);
        inner_evals += r.evaluations;
        inner_ok = inner_ok && r.converged;
        return r.value;
    };
    const QuadResult res = integrate_adaptive(slice_value, a, b, cfg);
    QuantityReport rep;
    rep.kind = QuantityKind::deficit_phi;
    rep.parameter = b;
    rep.center = center;
    rep.value = res.value;
    rep.error_estimate = res.error_estimate;
    rep.evaluations = res.evaluations + inner_evals;
    rep.converged = res.converged && inner_ok;
    return rep;
}

QuantityReport deficit_heatball(const AncientFlow& flow, const HeatBall& hb, bool phi_weighted,
                                const QuadConfig& cfg)
{
    const int n = flow.intrinsic_dim();
    const Center center{hb.center, hb.t0};
    HeatBallIntegrand integrand;
    integrand.f = [&, n, phi_weighted](const SliceGeometry& g, Real t) {
        const Real d = deficit_density(g, center, t);
        if (!phi_weighted)
            return d;
        const Real tau = t - hb.t0;
        return d * phi_from_sq((g.x - hb.center).squaredNorm(), tau, n);
    };
    const QuadResult res = integrate_heatball(flow, hb, integrand, cfg);
    QuantityReport rep;
    rep.kind = phi_weighted ? QuantityKind::deficit_phi : QuantityKind::deficit_plain;
    rep.parameter = hb.r;
    rep.center = center;
    rep.value = res.value;
    rep.error_estimate = res.error_estimate;
    rep.evaluations = res.evaluations;
    rep.converged = res.converged;
    return rep;
}

Real finite_radius_identity_residual(const AncientFlow& flow, Real r, const QuadConfig& cfg)
{
    const int n = flow.intrinsic_dim();
    HeatBall hb;
    hb.center = zero_vec(flow.ambient_dim());
    hb.t0 = 0;
    hb.r = r;
    hb.n = n;
    const Real rn = std::pow(r, n);
    const Real lhs = ecker_integral(flow, hb, cfg).value / rn -
                     gaussian_density(flow, origin_center(flow.ambient_dim()), cfg).value;
    const Real rhs = deficit_heatball(flow, hb, true, cfg).value -
                     deficit_heatball(flow, hb, false, cfg).value / rn;
    return std::abs(lhs - rhs);
}

DensityResult gaussian_density(const AncientFlow& flow, const Center& center,
                               const QuadConfig& cfg, Real first_offset, int points)
{
    DensityResult out;
    bool all_converged = true;
    for (int k = 0; k < points; ++k) {
        const Real t = center.t0 - first_offset * std::pow(Real(0.1), k);
        const QuantityReport rep = huisken_integral(flow, t, center, cfg);
        out.schedule_times.push_back(t);
        out.schedule_values.push_back(rep.value);
        all_converged = all_converged && rep.converged;
    }
    const LimitEstimate est = improper_limit(out.schedule_values);
    out.value = est.limit;
    out.error_bar = est.error_bar;
    out.converged = all_converged && est.converged;
    return out;
}

std::string csv_header_quantity()
{
    return "kind,parameter,center_x,center_t,value,error";
}

std::string csv_row(const QuantityReport& rep)
{
    char buf[512];
    std::string cx;
    for (int i = 0; i < rep.center.x0.size(); ++i) {
        if (i)
            cx += ';';
        std::snprintf(buf, sizeof(buf), "%.17g", rep.center.x0[i]);
        cx += buf;
    }
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%s,%.17g,%.17g,%.17g",
                  to_string(rep.kind).c_str(), rep.parameter, cx.c_str(), rep.center.t0,
                  rep.value, rep.error_estimate);
    return buf;
}

} // namespace mcf
