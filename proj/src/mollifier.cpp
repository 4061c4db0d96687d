#include "mcf/mollifier.hpp"

#include "mcf/quantities.hpp"

#include <algorithm>
#include <cmath>

namespace mcf {

namespace {

constexpr int kCells = 2048;

Real bump(Real z)
{
    if (z <= 0 || z >= 1)
        return 0;
    return std::exp(-1 / (z * (1 - z)));
}

// 7-point Gauss-Legendre on [a, b]; the bump and its CDF are smooth with all
// derivatives vanishing at the support ends, so per-cell panels are exact to
// machine precision.
template <class F>
Real gl7(const F& f, Real a, Real b)
{
    static const Real nodes[7] = {-0.949107912342758524526189684047851,
                                  -0.741531185599394439863864773280788,
                                  -0.405845151377397166906606412076961,
                                  0.0,
                                  0.405845151377397166906606412076961,
                                  0.741531185599394439863864773280788,
                                  0.949107912342758524526189684047851};
    static const Real weights[7] = {0.129484966168869693270611432679082,
                                    0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975,
                                    0.417959183673469387755102040816327,
                                    0.381830050505118944950369775488975,
                                    0.279705391489276667901467771423780,
                                    0.129484966168869693270611432679082};
    const Real c = Real(0.5) * (a + b), h = Real(0.5) * (b - a);
    Real total = 0;
    for (int i = 0; i < 7; ++i)
        total += weights[i] * f(c + h * nodes[i]);
    return total * h;
}

// cubic Hermite on a uniform table with exact node derivatives
Real hermite(const std::vector<Real>& values, const std::vector<Real>& slopes, Real z)
{
    const Real x = z * kCells;
    const auto i = std::min(static_cast<size_t>(std::max(x, Real(0))),
                            static_cast<size_t>(kCells - 1));
    const Real w = x - static_cast<Real>(i);
    const Real h = Real(1) / kCells;
    const Real v0 = values[i], v1 = values[i + 1];
    const Real m0 = slopes[i] * h, m1 = slopes[i + 1] * h;
    const Real w2 = w * w, w3 = w2 * w;
    return (2 * w3 - 3 * w2 + 1) * v0 + (w3 - 2 * w2 + w) * m0 + (-2 * w3 + 3 * w2) * v1 +
           (w3 - w2) * m1;
}

} // namespace

MollifierFamily::MollifierFamily(Real eps) : eps_(eps)
{
    if (!(eps > 0))
        throw std::domain_error("mollifier requires eps > 0");
    const Real h = Real(1) / kCells;
    std::vector<Real> cell_mass(kCells);
    for (int i = 0; i < kCells; ++i)
        cell_mass[i] = gl7(bump, i * h, (i + 1) * h);
    Real total = 0;
    cdf_.assign(kCells + 1, 0);
    for (int i = 0; i < kCells; ++i) {
        total += cell_mass[i];
        cdf_[i + 1] = total;
    }
    norm_ = 1 / total;
    for (Real& v : cdf_)
        v *= norm_;

    eta_nodes_.resize(kCells + 1);
    for (int i = 0; i <= kCells; ++i)
        eta_nodes_[i] = norm_ * bump(static_cast<Real>(i) / kCells);

    // second cumulative: per-cell integral of the CDF, inner partial mass by
    // quadrature against the bump
    ramp_.assign(kCells + 1, 0);
    Real acc = 0;
    for (int i = 0; i < kCells; ++i) {
        const Real a = i * h;
        const Real base = cdf_[i];
        acc += gl7(
            [&](Real z) { return base + norm_ * gl7(bump, a, z); }, a, a + h);
        ramp_[i + 1] = acc;
    }

    Real moment = 0;
    for (int i = 0; i < kCells; ++i)
        moment += gl7([&](Real z) { return norm_ * bump(z) * std::exp(-eps_ * z); }, i * h,
                      (i + 1) * h);
    alpha_ = std::log(moment);
}

Real MollifierFamily::scaled_eta(Real z) const
{
    return norm_ * bump(z);
}

Real MollifierFamily::scaled_zeta(Real z) const
{
    if (z <= 0)
        return 0;
    if (z >= 1)
        return 1;
    return std::clamp(hermite(cdf_, eta_nodes_, z), Real(0), Real(1));
}

Real MollifierFamily::eta(Real x) const
{
    return scaled_eta(x / eps_) / eps_;
}

Real MollifierFamily::zeta(Real x) const
{
    if (x <= 0)
        return 0;
    if (x >= eps_)
        return 1;
    return scaled_zeta(x / eps_);
}

Real MollifierFamily::Z(Real x) const
{
    if (x <= 0)
        return 0;
    if (x >= eps_)
        return eps_ * ramp_.back() + (x - eps_);
    const Real v = eps_ * hermite(ramp_, cdf_, x / eps_);
    // analytic envelope [x - eps]_+ <= Z <= [x]_+
    return std::clamp(v, positive_part(x - eps_), x);
}

Real MollifierFamily::zeta_radial_integral(Real psi1, int n, Real lo, Real hi) const
{
    // zeta(psi_1 + n log r) rises from 0 to 1 on r in (r0, r1)
    const Real r0 = std::exp(-psi1 / n);
    const Real r1 = std::exp((eps_ - psi1) / n);
    Real total = 0;
    const Real a = std::max(lo, r0);
    const Real b = std::min(hi, r1);
    if (a < b) {
        // the transition window spans a factor e^{eps/n}; a fixed composite
        // panel count resolves it to machine precision
        const int panels = 8;
        const Real step = (b - a) / panels;
        for (int i = 0; i < panels; ++i) {
            total += gl7(
                [&](Real r) {
                    return n * std::pow(r, -n - 1) * zeta(psi1 + n * std::log(r));
                },
                a + i * step, a + (i + 1) * step);
        }
    }
    const Real flat_lo = std::max(lo, r1);
    if (flat_lo < hi) {
        const Real upper = std::isfinite(hi) ? std::pow(hi, -n) : Real(0);
        total += std::pow(flat_lo, -n) - upper;
    }
    return total;
}

MollifierFamily make_mollifier(Real eps)
{
    return MollifierFamily(eps);
}

QuadResult smoothed_ecker(const AncientFlow& flow, Real r, Real s_cap,
                          const MollifierFamily& fam, const QuadConfig& cfg)
{
    const int n = flow.intrinsic_dim();
    HeatBall hb;
    hb.center = zero_vec(flow.ambient_dim());
    hb.t0 = 0;
    hb.r = r;
    hb.n = n;
    HeatBallIntegrand integrand;
    integrand.f = [&, n, r](const SliceGeometry& g, Real t) {
        const Real psi = psi_r_from_sq(g.x.squaredNorm(), t, r, n);
        const Real grad_sq = g.tangential(g.x).squaredNorm() / (4 * t * t);
        return grad_sq * fam.zeta(psi) + g.H.squaredNorm() * fam.Z(psi);
    };
    return integrate_heatball(flow, hb, integrand, cfg, s_cap);
}

SmoothedEckerLimit smoothed_ecker_limit(const AncientFlow& flow, Real r,
                                        const MollifierFamily& fam, const QuadConfig& cfg,
                                        int points)
{
    SmoothedEckerLimit out;
    const Real T = r * r / (4 * pi<Real>());
    const Real s0 = std::min(Real(1), T / 4);
    bool all_converged = true;
    for (int k = 0; k < points; ++k) {
        const Real s = -s0 * std::pow(Real(0.5), k);
        const QuadResult res = smoothed_ecker(flow, r, s, fam, cfg);
        out.schedule_s.push_back(s);
        out.schedule_values.push_back(res.value);
        all_converged = all_converged && res.converged;
    }
    const LimitEstimate est = improper_limit(out.schedule_values, 1e-8);
    out.value = est.limit;
    out.error_bar = est.error_bar + est.tail_diff;
    out.converged = all_converged;
    return out;
}

Real radial_kernel_identity_residual(const MollifierFamily& fam,
                             const std::vector<KernelPoint>& samples, int n)
{
    Real worst = 0;
    for (const KernelPoint& p : samples) {
        require_negative_time(p.t);
        const Real psi1 = psi_r_from_sq(p.x.squaredNorm(), p.t, Real(1), n);
        const Real lhs =
            fam.zeta_radial_integral(psi1, n, 0, std::numeric_limits<Real>::infinity());
        const Real rhs =
            std::exp(fam.alpha()) * phi_from_sq(p.x.squaredNorm(), p.t, n);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    return worst;
}

QuadResult error_term(const AncientFlow& flow, Real s, Real sigma, Real rho,
                      const MollifierFamily& fam, const QuadConfig& cfg)
{
    if (!(0 < sigma && sigma < rho) || !(s < 0))
        throw std::domain_error("error_term requires 0 < sigma < rho and s < 0");
    const int n = flow.intrinsic_dim();
    // slices exist only for r with s inside the window of E_r
    const Real r_min = std::max(sigma, std::sqrt(-4 * pi<Real>() * s) * (1 + 1e-14));
    if (!(r_min < rho))
        return QuadResult{};
    QuadConfig inner_cfg = cfg;
    inner_cfg.rel_tol = std::max(cfg.rel_tol * Real(0.3), Real(1e-13));
    long inner_evals = 0;
    bool inner_ok = true;
    auto by_radius = [&](Real r) {
        const Real R = slice_radius(r, s, n);
        if (!(R > 0))
            return Real(0);
        const AmbientVec center = zero_vec(flow.ambient_dim());
        const BallRestriction rest = restrict_to_ball(flow, s, center, R);
        if (rest.empty())
            return Real(0);
        SliceIntegrand f;
        f.center = center;
        f.gaussian_tau = s;
        f.f = [&, r, n](const SliceGeometry& g) {
            const Real psi = psi_r_from_sq(g.x.squaredNorm(), s, r, n);
            return n * std::pow(r, -n - 1) * fam.Z(psi);
        };
        const QuadResult res = integrate_slice(flow, s, f, &rest, inner_cfg);
        inner_evals += res.evaluations;
        inner_ok = inner_ok && res.converged;
        return res.value;
    };
    QuadResult res = integrate_adaptive(by_radius, r_min, rho, cfg);
    res.evaluations += inner_evals;
    res.converged = res.converged && inner_ok;
    return res;
}

SmoothedMonotonicityReport smoothed_monotonicity_check(const AncientFlow& flow, Real sigma,
                                                       Real rho, const MollifierFamily& fam,
                                                       const QuadConfig& cfg)
{
    if (!(0 < sigma && sigma < rho))
        throw std::domain_error("smoothed_monotonicity_check requires 0 < sigma < rho");
    const int n = flow.intrinsic_dim();
    SmoothedMonotonicityReport rep;

    const SmoothedEckerLimit at_rho = smoothed_ecker_limit(flow, rho, fam, cfg);
    const SmoothedEckerLimit at_sigma = smoothed_ecker_limit(flow, sigma, fam, cfg);
    rep.lhs = at_rho.value / std::pow(rho, n) - at_sigma.value / std::pow(sigma, n);
    rep.lhs_error_bar =
        at_rho.error_bar / std::pow(rho, n) + at_sigma.error_bar / std::pow(sigma, n);

    // RHS: deficit against the radial zeta kernel, supported inside E_rho
    HeatBall hb;
    hb.center = zero_vec(flow.ambient_dim());
    hb.t0 = 0;
    hb.r = rho;
    hb.n = n;
    const Center center{hb.center, hb.t0};
    HeatBallIntegrand integrand;
    integrand.f = [&, n, sigma, rho](const SliceGeometry& g, Real t) {
        const Real psi1 = psi_r_from_sq(g.x.squaredNorm(), t, Real(1), n);
        const Real kernel = fam.zeta_radial_integral(psi1, n, sigma, rho);
        if (kernel == 0)
            return Real(0);
        return deficit_density(g, center, t) * kernel;
    };
    const QuadResult rhs = integrate_heatball(flow, hb, integrand, cfg);
    rep.rhs = rhs.value;
    rep.residual = std::abs(rep.lhs - rep.rhs);
    rep.converged = rhs.converged && at_rho.converged && at_sigma.converged;
    return rep;
}

} // namespace mcf
