#include "mcf/quantities.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace mcf;

TEST_SUITE_BEGIN("quantities");

namespace {

constexpr Real kPi = pi<Real>();
// Gaussian density of the shrinking circle / cylinder, sqrt(2 pi / e)
const Real kCircleDensity = std::sqrt(2 * kPi / std::exp(1.0));

HeatBall ball(const AncientFlow& flow, Real r)
{
    HeatBall hb;
    hb.center = zero_vec(flow.ambient_dim());
    hb.t0 = 0;
    hb.r = r;
    hb.n = flow.intrinsic_dim();
    return hb;
}

Real ecker_normalized(const AncientFlow& flow, Real r, const QuadConfig& cfg)
{
    return ecker_integral(flow, ball(flow, r), cfg).value / std::pow(r, flow.intrinsic_dim());
}

} // namespace

TEST_CASE("huisken integral closed forms")
{
    QuadConfig cfg;
    SUBCASE("plane through the center is exactly 1")
    {
        auto plane = find_flow("plane");
        for (Real t : {-0.1, -1.0, -250.0}) {
            auto rep = huisken_integral(*plane, t, origin_center(3), cfg);
            CHECK(rep.converged);
            CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
    SUBCASE("shrinking circle gives sqrt(2 pi / e) at every time")
    {
        auto circle = find_flow("circle");
        for (Real t : {-0.05, -1.0, -30.0}) {
            auto rep = huisken_integral(*circle, t, origin_center(2), cfg);
            CHECK(rep.value == doctest::Approx(kCircleDensity).epsilon(1e-9));
        }
    }
    SUBCASE("sphere gives 4/e, cylinder gives sqrt(2 pi / e)")
    {
        auto sphere = find_flow("sphere2");
        auto cyl = find_flow("cylinder");
        CHECK(huisken_integral(*sphere, -2.0, origin_center(3), cfg).value ==
              doctest::Approx(4 / std::exp(1.0)).epsilon(1e-9));
        CHECK(huisken_integral(*cyl, -2.0, origin_center(3), cfg).value ==
              doctest::Approx(kCircleDensity).epsilon(1e-9));
    }
    SUBCASE("grim reaper approaches 2 far in the past")
    {
        auto reaper = find_flow("grim_reaper");
        auto rep = huisken_integral(*reaper, -1e4, origin_center(2), cfg);
        CHECK(rep.value == doctest::Approx(2.0).epsilon(1e-2));
    }
    CHECK_THROWS_AS(huisken_integral(*find_flow("line"), 0.5, origin_center(2), QuadConfig{}),
                    std::domain_error);
}

TEST_CASE("huisken integral is non-increasing in t")
{
    QuadConfig cfg;
    for (const auto& flow : catalog()) {
        const Center c = origin_center(flow->ambient_dim());
        Real prev = huisken_integral(*flow, -64.0, c, cfg).value;
        for (Real t : {-16.0, -4.0, -1.0, -0.25}) {
            const Real cur = huisken_integral(*flow, t, c, cfg).value;
            CHECK(prev >= cur - 1e-6);
            prev = cur;
        }
    }
}

TEST_CASE("finite-difference Huisken derivative matches the deficit rate")
{
    QuadConfig cfg;
    for (const char* name : {"grim_reaper", "angenent_oval", "bowl"}) {
        auto flow = find_flow(name);
        const Center c = origin_center(flow->ambient_dim());
        const int n = flow->intrinsic_dim();
        for (Real t : {-0.7, -2.5}) {
            auto value = [&](Real tt) { return huisken_integral(*flow, tt, c, cfg).value; };
            const Real fd = oracle::derivative(value, t, std::abs(t) * 1e-2);

            SliceIntegrand integrand;
            integrand.center = c.x0;
            integrand.gaussian_tau = t;
            integrand.f = [&](const SliceGeometry& g) {
                return deficit_density(g, c, t) *
                       phi_from_sq((g.x - c.x0).squaredNorm(), t, n);
            };
            const Real rate = integrate_slice(*flow, t, integrand, nullptr, cfg).value;
            CHECK(fd == doctest::Approx(-rate).epsilon(1e-4));
        }
    }
}

TEST_CASE("ecker integral on self-shrinkers equals the Gaussian density")
{
    QuadConfig cfg;
    SUBCASE("plane")
    {
        auto plane = find_flow("plane");
        for (Real r : {0.5, 2.0}) {
            CHECK(ecker_normalized(*plane, r, cfg) == doctest::Approx(1.0).epsilon(1e-4));
        }
    }
    SUBCASE("circle")
    {
        auto circle = find_flow("circle");
        for (Real r : {0.5, 1.0, 4.0}) {
            CHECK(ecker_normalized(*circle, r, cfg) ==
                  doctest::Approx(kCircleDensity).epsilon(1e-3));
        }
    }
    SUBCASE("plane outside the heat ball")
    {
        auto far_plane = recenter(find_flow("plane"), vec3(0, 0, -10), 0);
        CHECK(ecker_integral(*far_plane, ball(*far_plane, 1.0), cfg).value == 0.0);
    }
}

TEST_CASE("ecker normalized is non-decreasing in r and below Huisken")
{
    QuadConfig cfg;
    for (const char* name : {"grim_reaper", "angenent_oval"}) {
        auto flow = find_flow(name);
        Real prev = -1;
        for (Real r : {1.0, 2.0, 4.0, 8.0}) {
            const Real v = ecker_normalized(*flow, r, cfg);
            CHECK(v >= prev - 1e-6);
            // Ecker's quantity never exceeds Huisken's at t = -r^2/4
            const Real hui =
                huisken_integral(*flow, -r * r / 4, origin_center(2), cfg).value;
            CHECK(v <= hui + 1e-6);
            prev = v;
        }
    }
}

TEST_CASE("deficits vanish on self-shrinkers")
{
    QuadConfig cfg;
    for (const char* name : {"plane", "circle", "sphere2"}) {
        auto flow = find_flow(name);
        const Center c = origin_center(flow->ambient_dim());
        CHECK(std::abs(deficit_phi(*flow, -3.0, -0.5, c, cfg).value) <= 1e-8);
        const auto hb = ball(*flow, 1.5);
        CHECK(std::abs(deficit_heatball(*flow, hb, true, cfg).value) <= 1e-8);
        CHECK(std::abs(deficit_heatball(*flow, hb, false, cfg).value) <= 1e-8);
    }
}

TEST_CASE("integrated monotonicity: deficit equals the Huisken drop")
{
    QuadConfig cfg;
    auto reaper = find_flow("grim_reaper");
    const Center c = origin_center(2);
    const Real lhs = deficit_phi(*reaper, -100.0, -1.0, c, cfg).value;
    const Real rhs = huisken_integral(*reaper, -100.0, c, cfg).value -
                     huisken_integral(*reaper, -1.0, c, cfg).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(2e-6));
}

TEST_CASE("local monotonicity: dr derivative of A/r^n matches the deficit")
{
    QuadConfig cfg;
    auto reaper = find_flow("grim_reaper");
    const int n = 1;
    for (Real r : {2.0, 10.0}) {
        auto f = [&](Real rr) { return ecker_normalized(*reaper, rr, cfg); };
        const Real h = 0.1;
        const Real fd = (f(r + h) - f(r - h)) / (2 * h);
        const Real deficit = deficit_heatball(*reaper, ball(*reaper, r), false, cfg).value;
        const Real expected = n / std::pow(r, n + 1) * deficit;
        CHECK(deficit > 0);
        CHECK(fd == doctest::Approx(expected).epsilon(1e-3));
    }
}

TEST_CASE("finite-r identity residual")
{
    QuadConfig cfg;
    SUBCASE("self-shrinker: all deficit terms vanish")
    {
        CHECK(finite_radius_identity_residual(*find_flow("circle"), 2.0, cfg) <= 1e-6);
    }
    SUBCASE("grim reaper")
    {
        auto reaper = find_flow("grim_reaper");
        CHECK(finite_radius_identity_residual(*reaper, 5.0, cfg) < 5e-3);
        CHECK(finite_radius_identity_residual(*reaper, 20.0, cfg) < 5e-3);
    }
    SUBCASE("angenent oval")
    {
        CHECK(finite_radius_identity_residual(*find_flow("angenent_oval"), 5.0, cfg) < 5e-3);
    }
}

TEST_CASE("gaussian density")
{
    QuadConfig cfg;
    SUBCASE("plane through the center")
    {
        auto d = gaussian_density(*find_flow("plane"), origin_center(3), cfg);
        CHECK(d.value == doctest::Approx(1.0).epsilon(1e-7));
    }
    SUBCASE("grim reaper: smooth point vs point off the closure")
    {
        auto reaper = find_flow("grim_reaper");
        // the apex sits at the origin at t = 0
        auto on_curve = gaussian_density(*reaper, origin_center(2), cfg);
        CHECK(on_curve.value == doctest::Approx(1.0).epsilon(1e-3));
        // (0, 1) is not on M_0
        auto off_curve = gaussian_density(*reaper, Center{vec2(0, 1), 0}, cfg);
        CHECK(std::abs(off_curve.value) <= 1e-6);
        // a smooth non-apex point of M_0
        const Real x = 1.0;
        auto smooth = gaussian_density(*reaper, Center{vec2(x, -std::log(std::cos(x))), 0}, cfg);
        CHECK(smooth.value == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("angenent oval extinction density is the circle density")
    {
        auto d = gaussian_density(*find_flow("angenent_oval"), origin_center(2), cfg);
        CHECK(d.value == doctest::Approx(kCircleDensity).epsilon(2e-2));
    }
    SUBCASE("small-r Ecker values cross-check the density (limit at zero)")
    {
        auto oval = find_flow("angenent_oval");
        const Real v16 = ecker_normalized(*oval, 1.0 / 16, QuadConfig{});
        const Real v8 = ecker_normalized(*oval, 1.0 / 8, QuadConfig{});
        const Real density = gaussian_density(*oval, origin_center(2), QuadConfig{}).value;
        CHECK(std::abs(v16 - density) <= std::abs(v8 - density) + 1e-6);
        CHECK(v16 == doctest::Approx(density).epsilon(5e-3));
    }
}

TEST_CASE("rescaling identity A(M cap E_r)/r^n = A(M^r cap E_1)")
{
    QuadConfig cfg;
    for (const char* name : {"grim_reaper", "angenent_oval"}) {
        auto flow = find_flow(name);
        for (Real r : {2.0, 5.0}) {
            const Real lhs = ecker_normalized(*flow, r, cfg);
            auto rescaled = parabolic_rescale(flow, r);
            const Real rhs = ecker_normalized(*rescaled, 1.0, cfg);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
        }
    }
}

TEST_CASE("center independence of the limit at -infinity")
{
    QuadConfig cfg;
    auto reaper = find_flow("grim_reaper");
    std::vector<Real> a, b;
    const Center c1 = origin_center(2);
    const Center c2{vec2(0.7, -0.3), 0};
    for (Real t : {-16.0, -64.0, -256.0, -1024.0, -4096.0}) {
        a.push_back(huisken_integral(*reaper, t, c1, cfg).value);
        b.push_back(huisken_integral(*reaper, t, c2, cfg).value);
    }
    const auto la = improper_limit(a);
    const auto lb = improper_limit(b);
    CHECK(std::abs(la.limit - lb.limit) <= la.error_bar + lb.error_bar + 1e-9);
}

TEST_CASE("quantity CSV serialization")
{
    QuantityReport rep;
    rep.kind = QuantityKind::ecker;
    rep.parameter = 2;
    rep.center = {vec2(0, 0), 0};
    rep.value = 1.5;
    rep.error_estimate = 1e-9;
    CHECK(csv_header_quantity() == "kind,parameter,center_x,center_t,value,error");
    CHECK(csv_row(rep) == "ecker,2,0;0,0,1.5,1.0000000000000001e-09");
}

TEST_SUITE_END();
