// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include "mcf/entropy.hpp"
#include "mcf/limits.hpp"
#include "mcf/mollifier.hpp"
#include "mcf/quantities.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace mcf;

namespace {

constexpr Real kPi = pi<Real>();
const Real kCircleDensity = std::sqrt(2 * kPi / std::exp(1.0));

int failures = 0;
std::chrono::steady_clock::time_point suite_start;

struct Criterion {
    int id;
    std::string label;
    bool ok = true;
    std::string detail;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void require(bool condition, const std::string& what)
    {
        if (!condition && detail.size() < 400) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
        ok = ok && condition;
    }
    ~Criterion()
    {
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%2d] %s  %s (%.1f s)%s%s\n", id, ok ? "PASS" : "FAIL", label.c_str(), dt,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok)
            ++failures;
    }
};

std::string fmt(Real v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

Real ecker_normalized(const AncientFlow& flow, Real r, const QuadConfig& cfg)
{
    HeatBall hb;
    hb.center = zero_vec(flow.ambient_dim());
    hb.t0 = 0;
    hb.r = r;
    hb.n = flow.intrinsic_dim();
    return ecker_integral(flow, hb, cfg).value / std::pow(r, flow.intrinsic_dim());
}

std::vector<Real> schedule_pow(Real base, int count, Real sign = 1)
{
    std::vector<Real> out;
    for (int k = 0; k < count; ++k)
        out.push_back(sign * std::pow(base, k));
    return out;
}

} // namespace

int main()
{
    suite_start = std::chrono::steady_clock::now();
    QuadConfig cfg;
    const std::vector<Real> r128 = schedule_pow(2, 8);      // 1 .. 128
    const std::vector<Real> r64 = schedule_pow(2, 7);       // 1 .. 64
    const std::vector<Real> t47 = schedule_pow(4, 8, -1);   // -1 .. -4^7

    // shared heavy reports
    auto reaper = find_flow("grim_reaper");
    auto oval = find_flow("angenent_oval");
    auto bowl = find_flow("bowl");
    const LimitComparisonReport rep_reaper = verify_limit_agreement(*reaper, r128, t47, cfg);
    const LimitComparisonReport rep_oval = verify_limit_agreement(*oval, r128, t47, cfg);

    { // 1: self-shrinker exactness
        Criterion c{1, "self-shrinker exactness |A/r^n - Huisken| <= 1e-3"};
        for (const char* name : {"plane", "circle", "sphere2", "cylinder"}) {
            auto flow = find_flow(name);
            std::vector<Real> eckers, huiskens;
            for (Real r : {0.5, 1.0, 2.0, 8.0})
                eckers.push_back(ecker_normalized(*flow, r, cfg));
            for (Real t : {-0.1, -1.0, -10.0})
                huiskens.push_back(
                    huisken_integral(*flow, t, origin_center(flow->ambient_dim()), cfg).value);
            for (Real e : eckers)
                for (Real h : huiskens)
                    c.require(std::abs(e - h) <= 1e-3,
                              std::string(name) + " gap " + fmt(std::abs(e - h)));
            const Real target = std::string(name) == "plane" ? 1.0
                                : std::string(name) == "sphere2" ? 4 / std::exp(1.0)
                                                                 : kCircleDensity;
            for (Real e : eckers)
                c.require(std::abs(e - target) <= 1e-3, std::string(name) + " value");
        }
    }

    { // 2: Theorem 1 on the grim reaper
        Criterion c{2, "theorem 1 on grim reaper: both limits = 2 within 2e-2"};
        c.require(std::abs(rep_reaper.ecker_limit - 2) <= 2e-2,
                  "ecker limit " + fmt(rep_reaper.ecker_limit));
        c.require(std::abs(rep_reaper.huisken_limit - 2) <= 2e-2,
                  "huisken limit " + fmt(rep_reaper.huisken_limit));
        c.require(std::abs(rep_reaper.ecker_limit - rep_reaper.huisken_limit) <=
                      rep_reaper.ecker_bar + rep_reaper.huisken_bar,
                  "limits differ beyond bars");
        c.require(rep_reaper.verdict == Verdict::pass, "verdict");
    }

    { // 3: Corollary 3.2 on the bowl soliton
        Criterion c{3, "corollary 3.2 on bowl: three-way agreement at lambda(S^1)"};
        OptimizerConfig opt;
        opt.quad = cfg;
        const EntropyComparisonReport rep = verify_entropy_agreement(
            *bowl, r128, t47, {-1.0, -16.0, -256.0, -4096.0}, cfg, opt);
        // paper formula n omega_n ((n-1)/(2 pi e))^{(n-1)/2} at n = 2
        const Real target = 2 * unit_ball_volume(2) * std::sqrt(1 / (2 * kPi * std::exp(1.0)));
        c.require(std::abs(target - kCircleDensity) < 1e-12, "formula sanity");
        c.require(std::abs(rep.limits.ecker_limit - target) <= 2e-2,
                  "ecker " + fmt(rep.limits.ecker_limit));
        c.require(std::abs(rep.limits.huisken_limit - target) <= 2e-2,
                  "huisken " + fmt(rep.limits.huisken_limit));
        c.require(std::abs(rep.sup_lambda - target) <= 2e-2,
                  "sup lambda " + fmt(rep.sup_lambda));
        c.require(rep.three_way_pass, "three-way bars");
    }

    { // 4: Theorem 1 on the Angenent oval
        Criterion c{4, "theorem 1 on angenent oval: limits agree, both near 2"};
        c.require(std::abs(rep_oval.ecker_limit - rep_oval.huisken_limit) <=
                      rep_oval.ecker_bar + rep_oval.huisken_bar,
                  "limits differ beyond bars");
        c.require(std::abs(rep_oval.ecker_limit - 2) <= 5e-2,
                  "ecker " + fmt(rep_oval.ecker_limit));
        c.require(std::abs(rep_oval.huisken_limit - 2) <= 5e-2,
                  "huisken " + fmt(rep_oval.huisken_limit));
    }

    { // 5: monotonicity suites
        Criterion c{5, "monotonicity: Huisken in t, Ecker in r, with derivative checks"};
        for (const auto& flow : catalog()) {
            const Center center = origin_center(flow->ambient_dim());
            // t decreases along the schedule, so the series must not decrease
            Real prev = -1e300;
            for (Real t : t47) {
                const Real v = huisken_integral(*flow, t, center, cfg).value;
                c.require(v >= prev - 1e-6, flow->name() + " huisken monotonicity");
                prev = v;
            }
            prev = -1e300;
            for (Real r : r64) {
                const Real v = ecker_normalized(*flow, r, cfg);
                c.require(v >= prev - 1e-6, flow->name() + " ecker monotonicity");
                prev = v;
            }
        }
        // (a) d/dt of Huisken equals minus the deficit rate, 10 samples
        struct Sample {
            const char* flow;
            Real t;
        };
        const Sample samples[10] = {{"grim_reaper", -0.5}, {"grim_reaper", -1.5},
                                    {"grim_reaper", -4.0}, {"grim_reaper", -9.0},
                                    {"angenent_oval", -0.5}, {"angenent_oval", -2.0},
                                    {"angenent_oval", -6.0}, {"bowl", -0.5},
                                    {"bowl", -2.0}, {"bowl", -8.0}};
        for (const auto& s : samples) {
            auto flow = find_flow(s.flow);
            const Center center = origin_center(flow->ambient_dim());
            const int n = flow->intrinsic_dim();
            auto value = [&](Real tt) {
                return huisken_integral(*flow, tt, center, cfg).value;
            };
            const Real h = std::abs(s.t) * 1e-2;
            const Real d1 = (value(s.t + h) - value(s.t - h)) / (2 * h);
            const Real d2 = (value(s.t + h / 2) - value(s.t - h / 2)) / h;
            const Real fd = (4 * d2 - d1) / 3;
            SliceIntegrand integrand;
            integrand.center = center.x0;
            integrand.gaussian_tau = s.t;
            integrand.f = [&](const SliceGeometry& g) {
                return deficit_density(g, center, s.t) *
                       phi_from_sq((g.x - center.x0).squaredNorm(), s.t, n);
            };
            const Real rate = integrate_slice(*flow, s.t, integrand, nullptr, cfg).value;
            c.require(std::abs(fd + rate) <= 1e-4 * std::abs(rate),
                      std::string(s.flow) + " fd@" + fmt(s.t));
        }
        // (b) d/dr of A/r^n equals (n/r^{n+1}) deficit at r in {2, 10};
        // central differences at h = 0.1 with one Richardson refinement
        for (const char* name : {"grim_reaper", "angenent_oval"}) {
            auto flow = find_flow(name);
            const int n = flow->intrinsic_dim();
            for (Real r : {2.0, 10.0}) {
                auto central = [&](Real h) {
                    return (ecker_normalized(*flow, r + h, cfg) -
                            ecker_normalized(*flow, r - h, cfg)) /
                           (2 * h);
                };
                const Real fd = (4 * central(0.05) - central(0.1)) / 3;
                HeatBall hb;
                hb.center = zero_vec(flow->ambient_dim());
                hb.t0 = 0;
                hb.r = r;
                hb.n = n;
                const Real deficit = deficit_heatball(*flow, hb, false, cfg).value;
                const Real expected = n / std::pow(r, n + 1) * deficit;
                c.require(std::abs(fd - expected) <= 1e-3 * std::abs(expected),
                          std::string(name) + " dr@" + fmt(r));
            }
        }
    }

    { // 6: Ecker below Huisken at the paired time
        Criterion c{6, "ordering A/r^n <= Huisken(-r^2/4) + 1e-6, all flows and radii"};
        for (const auto& flow : catalog()) {
            for (Real r : r64) {
                const Real e = ecker_normalized(*flow, r, cfg);
                const Real h =
                    huisken_integral(*flow, -r * r / 4, origin_center(flow->ambient_dim()), cfg)
                        .value;
                c.require(e <= h + 1e-6, flow->name() + " r=" + fmt(r));
            }
        }
    }

    { // 7: finite-radius identity
        Criterion c{7, "finite-r identity residual < 5e-3 at r in {5, 20}"};
        for (const char* name : {"grim_reaper", "angenent_oval"}) {
            auto flow = find_flow(name);
            for (Real r : {5.0, 20.0}) {
                const Real res = finite_radius_identity_residual(*flow, r, cfg);
                c.require(res < 5e-3, std::string(name) + " r=" + fmt(r) + " res=" + fmt(res));
            }
        }
    }

    { // 8: mollifier suite
        Criterion c{8, "mollifier suite: envelopes, alpha, kernel identity, sandwich, decay"};
        std::mt19937 rng(99);
        std::uniform_real_distribution<Real> ux(-1.0, 1.5);
        Real prev_alpha = -1e300;
        for (Real eps : {0.5, 0.1, 0.02}) {
            const MollifierFamily fam = make_mollifier(eps);
            long violations = 0;
            for (int i = 0; i < 10000; ++i) {
                const Real x = ux(rng);
                const Real zeta = fam.zeta(x);
                if (!((x - eps > 0 ? 1.0 : 0.0) <= zeta && zeta <= (x > 0 ? 1.0 : 0.0)))
                    ++violations;
                const Real Z = fam.Z(x);
                if (!(positive_part(x - eps) <= Z && Z <= positive_part(x)))
                    ++violations;
            }
            c.require(violations == 0, "sandwich violations eps=" + fmt(eps));
            c.require(fam.alpha() <= 0, "alpha sign");
            c.require(fam.alpha() > prev_alpha, "alpha increasing");
            prev_alpha = fam.alpha();
        }
        for (Real eps : {0.5, 0.1}) {
            const MollifierFamily fam = make_mollifier(eps);
            std::vector<KernelPoint> grid;
            for (Real x : {0.0, 0.7, 1.5})
                for (Real t : {-0.2, -1.0, -3.0})
                    grid.push_back({vec2(x, 0), t});
            const Real res = radial_kernel_identity_residual(fam, grid, 1);
            c.require(res < 1e-6, "kernel identity eps=" + fmt(eps) + " res=" + fmt(res));
        }
        {
            const MollifierFamily fam = make_mollifier(0.1);
            auto circle = find_flow("circle");
            const Real r = 2.0;
            HeatBall hb;
            hb.center = vec2(0, 0);
            hb.t0 = 0;
            hb.n = 1;
            hb.r = r;
            const Real upper = ecker_integral(*circle, hb, cfg).value / r;
            hb.r = std::exp(-0.1) * r;
            const Real lower = std::exp(-0.1) * ecker_integral(*circle, hb, cfg).value / r;
            const Real mid = smoothed_ecker_limit(*circle, r, fam, cfg).value / r;
            c.require(lower <= mid + 1e-6 && mid <= upper + 1e-6, "smoothed sandwich");

            for (const char* name : {"grim_reaper", "angenent_oval"}) {
                auto flow = find_flow(name);
                Real prev = 1e300;
                for (Real s : {-1e-1, -1e-2, -1e-3, -1e-4}) {
                    const Real e = error_term(*flow, s, 3.0, 6.0, fam, cfg).value;
                    c.require(e < prev, std::string(name) + " error term at s=" + fmt(s));
                    prev = e;
                }
            }
        }
    }

    { // 9: limit at zero
        Criterion c{9, "limit at zero: A/r^n at r=1/16 within 5e-3 of the density"};
        auto plane = find_flow("plane");
        const Real plane_small = ecker_normalized(*plane, 1.0 / 16, cfg);
        const Real plane_density = gaussian_density(*plane, origin_center(3), cfg).value;
        c.require(std::abs(plane_density - 1.0) <= 1e-6, "plane density");
        c.require(std::abs(plane_small - plane_density) <= 5e-3,
                  "plane gap " + fmt(std::abs(plane_small - plane_density)));
        const Real oval_small = ecker_normalized(*oval, 1.0 / 16, cfg);
        const Real oval_density = gaussian_density(*oval, origin_center(2), cfg).value;
        c.require(std::abs(oval_density - kCircleDensity) <= 2e-2, "oval density value");
        c.require(std::abs(oval_small - oval_density) <= 5e-3,
                  "oval gap " + fmt(std::abs(oval_small - oval_density)));
    }

    { // 10: rescaling and recentering
        Criterion c{10, "parabolic rescaling identity and center independence"};
        for (const char* name : {"grim_reaper", "circle"}) {
            auto flow = find_flow(name);
            for (Real r : {2.0, 5.0}) {
                const Real lhs = ecker_normalized(*flow, r, cfg);
                const Real rhs = ecker_normalized(*parabolic_rescale(flow, r), 1.0, cfg);
                c.require(std::abs(lhs - rhs) <= 1e-6 * std::abs(lhs),
                          std::string(name) + " rescale r=" + fmt(r));
            }
        }
        auto moved = recenter(reaper, vec2(0.7, -0.3), 0.0);
        const LimitComparisonReport rep_moved = verify_limit_agreement(*moved, r64, t47, cfg);
        const LimitComparisonReport rep_base = verify_limit_agreement(*reaper, r64, t47, cfg);
        c.require(std::abs(rep_moved.ecker_limit - rep_base.ecker_limit) <=
                      rep_moved.ecker_bar + rep_base.ecker_bar,
                  "ecker center dependence");
        c.require(std::abs(rep_moved.huisken_limit - rep_base.huisken_limit) <=
                      rep_moved.huisken_bar + rep_base.huisken_bar,
                  "huisken center dependence");
    }

    { // 11: entropy monotonicity
        Criterion c{11, "entropy nonincreasing in t (1e-4); translator lambda constant"};
        OptimizerConfig opt;
        opt.quad = cfg;
        for (const auto& flow : catalog()) {
            const auto sched = entropy_schedule(*flow, {-0.5, -4.0, -32.0, -256.0}, opt);
            c.require(sched.monotone, flow->name() + " lambda monotonicity");
            if (flow->translator_direction()) {
                Real lo = 1e300, hi = -1e300;
                for (const auto& r : sched.results) {
                    lo = std::min(lo, r.lambda);
                    hi = std::max(hi, r.lambda);
                }
                c.require(hi - lo <= 1e-4,
                          flow->name() + " translator spread " + fmt(hi - lo));
            }
        }
    }

    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
    std::printf("%s: %d criterion(s) failed (total %.1f s)\n",
                failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", failures, total);
    return failures == 0 ? 0 : 1;
}
