#include "mcf/limits.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <mutex>

namespace mcf {

using nlohmann::json;

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass:
        return "PASS";
    case Verdict::pass_both_diverge:
        return "PASS_BOTH_DIVERGE";
    case Verdict::fail_mismatch:
        return "FAIL_MISMATCH";
    case Verdict::degraded:
        return "DEGRADED";
    }
    return "UNKNOWN";
}

std::vector<Real> default_r_schedule()
{
    std::vector<Real> rs;
    for (int k = 0; k <= 6; ++k)
        rs.push_back(std::pow(2.0, k));
    return rs;
}

std::vector<Real> default_t_schedule()
{
    std::vector<Real> ts;
    for (int k = 0; k <= 7; ++k)
        ts.push_back(-std::pow(4.0, k));
    return ts;
}

bool classify_divergence(const std::vector<Real>& values)
{
    if (values.size() < 3)
        return false;
    const size_t m = values.size();
    if (!(std::abs(values[m - 1]) > 1e6))
        return false;
    const Real d1 = std::abs(values[m - 1] - values[m - 2]);
    const Real d0 = std::abs(values[m - 2] - values[m - 3]);
    return d0 > 0 && d1 / d0 >= 0.5;
}

namespace {

// truncation/bracketing accuracy floor of the integrators; keeps the combined
// bars honest when a series converges to machine flatness
constexpr Real kBarFloor = 3e-6;

template <class F>
std::vector<SeriesPoint> map_schedule(const std::vector<Real>& params, int threads, F&& eval)
{
    std::vector<SeriesPoint> out(params.size());
    if (threads <= 1) {
        for (size_t i = 0; i < params.size(); ++i)
            out[i] = eval(params[i]);
        return out;
    }
    // bounded pool with deterministic slot assignment
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> workers;
    std::mutex m;
    for (int w = 0; w < threads; ++w) {
        workers.push_back(std::async(std::launch::async, [&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= params.size())
                    return;
                SeriesPoint p = eval(params[i]);
                std::lock_guard<std::mutex> lock(m);
                out[i] = p;
            }
        }));
    }
    for (auto& w : workers)
        w.get();
    return out;
}

struct LimitSummary {
    Real limit = 0, bar = 0;
    bool monotone = true;
};

LimitSummary summarize(const std::vector<SeriesPoint>& series, bool increasing)
{
    LimitSummary out;
    std::vector<Real> values;
    Real worst_quad = 0;
    for (const auto& p : series) {
        values.push_back(p.value);
        worst_quad = std::max(worst_quad, p.error);
    }
    for (size_t i = 1; i < values.size(); ++i) {
        const Real step = values[i] - values[i - 1];
        if (increasing ? step < -1e-6 : step > 1e-6)
            out.monotone = false;
    }
    const LimitEstimate est = improper_limit(values, 1e-6);
    out.limit = est.limit;
    out.bar = std::max(worst_quad + est.tail_diff + est.error_bar, kBarFloor);
    return out;
}

// The Ecker tail carries the slice-radius geometry: R_r^2 = 2nt log(-4pi t/r^2)
// puts a (log r)^{n/2} factor on the r^{-n} correction, which a plain
// geometric tail cannot model. Fit v = L - (A + B (log r)^{n/2}) / r^n through
// the last three points, guarded by the geometric estimate.
LimitSummary summarize_ecker(const std::vector<SeriesPoint>& series, int n)
{
    LimitSummary out = summarize(series, true);
    const size_t m = series.size();
    const Real v_last = series[m - 1].value;
    const Real d_last = std::abs(series[m - 1].value - series[m - 2].value);
    if (d_last <= std::max(Real(1e-6), 1e-6 * std::abs(v_last)))
        return out; // converged to the integrator floor

    Eigen::Matrix3d M;
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i) {
        const auto& p = series[m - 3 + i];
        const Real rn = std::pow(p.parameter, n);
        M(i, 0) = 1;
        M(i, 1) = -1 / rn;
        M(i, 2) = -std::pow(std::log(p.parameter), Real(0.5) * n) / rn;
        rhs(i) = p.value;
    }
    const Eigen::Vector3d sol = M.fullPivLu().solve(rhs);
    const Real L = sol(0);
    if (!std::isfinite(L))
        return out;
    const Real geo_correction = std::abs(out.limit - v_last);
    if (L < v_last - 1e-9 || std::abs(L - v_last) > 4 * (geo_correction + d_last))
        return out; // fit inconsistent with a nondecreasing series
    LimitSummary model = out;
    model.limit = L;
    model.bar = std::max(std::abs(L - out.limit) + Real(0.25) * std::abs(L - v_last) +
                             series[m - 1].error,
                         kBarFloor);
    return model;
}

} // namespace

LimitComparisonReport verify_limit_agreement(const AncientFlow& flow, const std::vector<Real>& r_schedule,
                               const std::vector<Real>& t_schedule, const QuadConfig& cfg,
                               int threads)
{
    if (r_schedule.size() < 5 || t_schedule.size() < 5)
        throw std::invalid_argument("verify_limit_agreement requires schedules with >= 5 points");
    LimitComparisonReport rep;
    rep.flow = flow.name();
    rep.n = flow.intrinsic_dim();
    const int n = rep.n;
    const int N = flow.ambient_dim();

    rep.ecker = map_schedule(r_schedule, threads, [&](Real r) {
        HeatBall hb;
        hb.center = zero_vec(N);
        hb.t0 = 0;
        hb.r = r;
        hb.n = n;
        const QuantityReport q = ecker_integral(flow, hb, cfg);
        return SeriesPoint{r, q.value / std::pow(r, n), q.error_estimate / std::pow(r, n),
                           q.converged};
    });
    rep.huisken = map_schedule(t_schedule, threads, [&](Real t) {
        const QuantityReport q = huisken_integral(flow, t, origin_center(N), cfg);
        return SeriesPoint{t, q.value, q.error_estimate, q.converged};
    });
    rep.huisken_paired = map_schedule(r_schedule, threads, [&](Real r) {
        const Real t = -r * r / 4;
        const QuantityReport q = huisken_integral(flow, t, origin_center(N), cfg);
        return SeriesPoint{t, q.value, q.error_estimate, q.converged};
    });

    for (const auto& p : rep.ecker)
        rep.finite = rep.finite && p.converged && std::isfinite(p.value);
    for (const auto& p : rep.huisken)
        rep.finite = rep.finite && p.converged && std::isfinite(p.value);

    for (size_t i = 0; i < rep.ecker.size(); ++i)
        if (rep.ecker[i].value > rep.huisken_paired[i].value + 1e-6)
            rep.upper_bound_ok = false;

    std::vector<Real> ecker_values, huisken_values;
    for (const auto& p : rep.ecker)
        ecker_values.push_back(p.value);
    for (const auto& p : rep.huisken)
        huisken_values.push_back(p.value);
    rep.ecker_diverges = classify_divergence(ecker_values);
    rep.huisken_diverges = classify_divergence(huisken_values);

    const LimitSummary le = summarize_ecker(rep.ecker, n);
    const LimitSummary lh = summarize(rep.huisken, true);
    rep.ecker_limit = le.limit;
    rep.ecker_bar = le.bar;
    rep.huisken_limit = lh.limit;
    rep.huisken_bar = lh.bar;
    rep.ecker_monotone = le.monotone;
    rep.huisken_monotone = lh.monotone;

    rep.margin = std::abs(rep.ecker_limit - rep.huisken_limit) - (rep.ecker_bar + rep.huisken_bar);
    if (!rep.finite) {
        rep.verdict = Verdict::degraded;
    } else if (rep.ecker_diverges && rep.huisken_diverges) {
        rep.verdict = Verdict::pass_both_diverge;
    } else if (rep.ecker_diverges != rep.huisken_diverges) {
        rep.verdict = Verdict::fail_mismatch;
    } else if (rep.margin <= 0 && rep.ecker_monotone && rep.huisken_monotone &&
               rep.upper_bound_ok) {
        rep.verdict = Verdict::pass;
    } else {
        rep.verdict = Verdict::fail_mismatch;
    }
    return rep;
}

EntropyComparisonReport verify_entropy_agreement(const AncientFlow& flow,
                                     const std::vector<Real>& r_schedule,
                                     const std::vector<Real>& t_schedule,
                                     const std::vector<Real>& entropy_times,
                                     const QuadConfig& cfg, const OptimizerConfig& opt,
                                     int threads)
{
    EntropyComparisonReport rep;
    rep.limits = verify_limit_agreement(flow, r_schedule, t_schedule, cfg, threads);

    const EntropySchedule sched = entropy_schedule(flow, entropy_times, opt);
    for (const auto& r : sched.results)
        rep.lambda.push_back({r.t, r.lambda, 0, r.converged});
    rep.sup_lambda = sched.sup_estimate;
    rep.lambda_bar = sched.error_bar + 1e-4;

    const Real a = rep.limits.ecker_limit, ba = rep.limits.ecker_bar;
    const Real b = rep.limits.huisken_limit, bb = rep.limits.huisken_bar;
    const Real c = rep.sup_lambda, bc = rep.lambda_bar;
    rep.worst_gap = std::max({std::abs(a - b) - (ba + bb), std::abs(a - c) - (ba + bc),
                              std::abs(b - c) - (bb + bc)});
    rep.three_way_pass = (rep.limits.verdict == Verdict::pass ||
                          rep.limits.verdict == Verdict::pass_both_diverge) &&
                         rep.worst_gap <= 0;
    return rep;
}

IntegratedHuiskenReport verify_integrated_huisken(const AncientFlow& flow, Real tau, Real theta,
                                                  const QuadConfig& cfg)
{
    if (!(tau < theta) || !(theta < 0))
        throw std::domain_error("verify_integrated_huisken requires tau < theta < 0");
    IntegratedHuiskenReport rep;
    const Center c = origin_center(flow.ambient_dim());
    const Real at_theta = huisken_integral(flow, theta, c, cfg).value;
    const Real at_tau = huisken_integral(flow, tau, c, cfg).value;
    rep.lhs = at_theta - at_tau;
    rep.rhs = -deficit_phi(flow, tau, theta, c, cfg).value;
    rep.residual = std::abs(rep.lhs - rep.rhs);
    rep.relative = rep.residual / std::max({std::abs(rep.lhs), std::abs(rep.rhs), Real(1e-30)});
    return rep;
}

namespace {

json series_to_json(const std::vector<SeriesPoint>& series)
{
    json arr = json::array();
    for (const auto& p : series)
        arr.push_back({{"parameter", p.parameter},
                       {"value", p.value},
                       {"error", p.error},
                       {"converged", p.converged}});
    return arr;
}

json limit_report_to_json(const LimitComparisonReport& rep)
{
    return json{{"flow", rep.flow},
                {"n", rep.n},
                {"ecker", series_to_json(rep.ecker)},
                {"huisken", series_to_json(rep.huisken)},
                {"huisken_paired", series_to_json(rep.huisken_paired)},
                {"ecker_limit", rep.ecker_limit},
                {"ecker_bar", rep.ecker_bar},
                {"huisken_limit", rep.huisken_limit},
                {"huisken_bar", rep.huisken_bar},
                {"ecker_monotone", rep.ecker_monotone},
                {"huisken_monotone", rep.huisken_monotone},
                {"upper_bound_ok", rep.upper_bound_ok},
                {"finite", rep.finite},
                {"ecker_diverges", rep.ecker_diverges},
                {"huisken_diverges", rep.huisken_diverges},
                {"verdict", to_string(rep.verdict)},
                {"margin", rep.margin}};
}

void append_series_csv(std::string& out, const char* kind,
                       const std::vector<SeriesPoint>& series)
{
    char buf[256];
    for (const auto& p : series) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%d\n", kind, p.parameter,
                      p.value, p.error, p.converged ? 1 : 0);
        out += buf;
    }
}

} // namespace

std::string limit_report_json(const LimitComparisonReport& rep)
{
    return limit_report_to_json(rep).dump(2) + "\n";
}

std::string entropy_report_json(const EntropyComparisonReport& rep)
{
    json j{{"limits", limit_report_to_json(rep.limits)},
           {"lambda", series_to_json(rep.lambda)},
           {"sup_lambda", rep.sup_lambda},
           {"lambda_bar", rep.lambda_bar},
           {"three_way_pass", rep.three_way_pass},
           {"worst_gap", rep.worst_gap}};
    return j.dump(2) + "\n";
}

std::string series_csv(const LimitComparisonReport& rep)
{
    std::string out = "kind,parameter,value,error,converged\n";
    append_series_csv(out, "ecker", rep.ecker);
    append_series_csv(out, "huisken", rep.huisken);
    append_series_csv(out, "huisken_paired", rep.huisken_paired);
    return out;
}

std::string series_csv(const EntropyComparisonReport& rep)
{
    std::string out = series_csv(rep.limits);
    append_series_csv(out, "lambda", rep.lambda);
    return out;
}

} // namespace mcf
