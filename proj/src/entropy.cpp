#include "mcf/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace mcf {

Real f_functional(const AncientFlow& flow, Real t, const AmbientVec& x0, Real t0,
                  const QuadConfig& cfg)
{
    if (!(t0 > 0))
        throw std::domain_error("f_functional requires t0 > 0");
    return huisken_integral(flow, t, Center{x0, t + t0}, cfg).value;
}

namespace {

struct Objective {
    const AncientFlow& flow;
    Real t;
    EntropySearchSpace space;
    QuadConfig quad;
    long evaluations = 0;
    Real best_value = -1;
    std::vector<Real> best_params;

    int dim() const { return static_cast<int>(space.directions.size()) + 1; }

    AmbientVec center_of(const std::vector<Real>& params) const
    {
        AmbientVec x0 = space.base;
        for (size_t i = 0; i < space.directions.size(); ++i)
            x0 += params[i] * space.directions[i];
        return x0;
    }

    // params = (coefficients along the search directions, log t0)
    Real operator()(const std::vector<Real>& params)
    {
        const Real log_t0 = params.back();
        if (log_t0 > 700)
            return -1e300;
        const Real t0 = std::exp(log_t0);
        Real value;
        try {
            value = f_functional(flow, t, center_of(params), t0, quad);
        } catch (const std::exception&) {
            return -1e300;
        }
        ++evaluations;
        if (value > best_value) {
            best_value = value;
            best_params = params;
        }
        return value;
    }
};

struct NelderMeadOutcome {
    Real value = -1;
    std::vector<Real> params;
    int iterations = 0;
    bool converged = false;
};

NelderMeadOutcome nelder_mead_maximize(Objective& obj, const std::vector<Real>& start,
                                       const OptimizerConfig& opt)
{
    const int n = static_cast<int>(start.size());
    std::vector<std::vector<Real>> simplex(n + 1, start);
    for (int i = 0; i < n; ++i)
        simplex[i + 1][i] += (std::abs(start[i]) > 1 ? 0.1 * std::abs(start[i]) : 0.25);
    std::vector<Real> value(n + 1);
    for (int i = 0; i <= n; ++i)
        value[i] = obj(simplex[i]);

    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i)
            idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return value[a] > value[b]; });
        std::vector<std::vector<Real>> s2(n + 1);
        std::vector<Real> v2(n + 1);
        for (int i = 0; i <= n; ++i) {
            s2[i] = simplex[idx[i]];
            v2[i] = value[idx[i]];
        }
        simplex.swap(s2);
        value.swap(v2);
    };

    NelderMeadOutcome out;
    for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
        order();
        Real diameter = 0, spread = value[0] - value[n];
        for (int i = 1; i <= n; ++i)
            for (int j = 0; j < n; ++j)
                diameter = std::max(diameter,
                                    std::abs(simplex[i][j] - simplex[0][j]) /
                                        std::max(Real(1), std::abs(simplex[0][j])));
        if (diameter < opt.simplex_tol && spread < opt.value_tol) {
            out.converged = true;
            break;
        }

        std::vector<Real> centroid(n, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                centroid[j] += simplex[i][j] / n;
        auto blend = [&](Real coef) {
            std::vector<Real> p(n);
            for (int j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            return p;
        };

        const auto reflected = blend(-1);
        const Real fr = obj(reflected);
        if (fr > value[0]) {
            const auto expanded = blend(-2);
            const Real fe = obj(expanded);
            if (fe > fr) {
                simplex[n] = expanded;
                value[n] = fe;
            } else {
                simplex[n] = reflected;
                value[n] = fr;
            }
        } else if (fr > value[n - 1]) {
            simplex[n] = reflected;
            value[n] = fr;
        } else {
            const auto contracted = blend(fr > value[n] ? -0.5 : 0.5);
            const Real fc = obj(contracted);
            if (fc > std::max(fr, value[n])) {
                simplex[n] = contracted;
                value[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    for (int j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + Real(0.5) * (simplex[i][j] - simplex[0][j]);
                    value[i] = obj(simplex[i]);
                }
            }
        }
    }
    order();
    out.value = value[0];
    out.params = simplex[0];
    return out;
}

} // namespace

EntropyResult entropy_of_slice(const AncientFlow& flow, Real t, const OptimizerConfig& opt)
{
    if (!(t < 0))
        throw std::domain_error("entropy_of_slice requires t < 0");
    Objective obj{flow, t, flow.entropy_search_space(t), opt.quad};
    const int k = static_cast<int>(obj.space.directions.size());

    // Gaussian-weighted centroid of the slice at scale |t| seeds the spatial
    // coefficients.
    std::vector<Real> centroid_coef(k, 0);
    {
        SliceIntegrand mass;
        mass.center = obj.space.base;
        mass.gaussian_tau = t;
        const int n = flow.intrinsic_dim();
        const AmbientVec base = obj.space.base;
        mass.f = [&, n](const SliceGeometry& g) {
            return phi_from_sq((g.x - base).squaredNorm(), t, n);
        };
        QuadConfig coarse = opt.quad;
        coarse.rel_tol = 1e-6;
        const Real m0 = integrate_slice(flow, t, mass, nullptr, coarse).value;
        if (m0 > 0) {
            for (int i = 0; i < k; ++i) {
                SliceIntegrand mi = mass;
                const AmbientVec dir = obj.space.directions[i];
                const int nn = flow.intrinsic_dim();
                mi.f = [&, nn, dir, base](const SliceGeometry& g) {
                    return (g.x - base).dot(dir) *
                           phi_from_sq((g.x - base).squaredNorm(), t, nn);
                };
                centroid_coef[i] = integrate_slice(flow, t, mi, nullptr, coarse).value / m0;
            }
        }
    }

    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<Real> jitter(0.0, 0.35);

    EntropyResult result;
    result.t = t;
    const Real scales[3] = {-t / 4, -t, -4 * t};
    for (int s = 0; s < opt.starts; ++s) {
        std::vector<Real> start(k + 1);
        for (int i = 0; i < k; ++i)
            start[i] = centroid_coef[i];
        start[k] = std::log(scales[s % 3]);
        if (s >= 3) {
            for (int i = 0; i < k; ++i)
                start[i] += jitter(rng) * std::sqrt(-t);
            start[k] += jitter(rng);
        }
        auto outcome = nelder_mead_maximize(obj, start, opt);
        StartTrace trace;
        trace.index = s;
        trace.best_value = outcome.value;
        trace.iterations = outcome.iterations;
        trace.converged = outcome.converged;
        result.starts.push_back(trace);
        result.converged = result.converged || outcome.converged;
    }
    result.evaluations = obj.evaluations;
    result.lambda = obj.best_value;
    result.argmax_x = obj.center_of(obj.best_params);
    result.argmax_t0 = std::exp(obj.best_params.back());
    return result;
}

EntropySchedule entropy_schedule(const AncientFlow& flow, const std::vector<Real>& times,
                                 const OptimizerConfig& opt)
{
    EntropySchedule out;
    std::vector<Real> lambdas;
    for (Real t : times) {
        out.results.push_back(entropy_of_slice(flow, t, opt));
        lambdas.push_back(out.results.back().lambda);
    }
    // times decrease, lambda must not decrease along them (optimizer slack)
    for (size_t i = 1; i < lambdas.size(); ++i)
        if (lambdas[i] < lambdas[i - 1] - 1e-4)
            out.monotone = false;
    if (lambdas.size() >= 3) {
        const LimitEstimate est = improper_limit(lambdas, 1e-4);
        out.sup_estimate = est.limit;
        out.error_bar = est.error_bar + 1e-4;
    } else if (!lambdas.empty()) {
        out.sup_estimate = lambdas.back();
        out.error_bar = 1e-4;
    }
    return out;
}

std::string csv_header_entropy(int ambient_dim)
{
    std::string header = "t,lambda";
    for (int i = 0; i < ambient_dim; ++i)
        header += ",x0_" + std::to_string(i);
    header += ",t0,converged";
    return header;
}

std::string csv_row(const EntropyResult& r)
{
    char buf[64];
    std::string row;
    std::snprintf(buf, sizeof(buf), "%.17g", r.t);
    row = buf;
    std::snprintf(buf, sizeof(buf), ",%.17g", r.lambda);
    row += buf;
    for (int i = 0; i < r.argmax_x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), ",%.17g", r.argmax_x[i]);
        row += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.17g,%d", r.argmax_t0, r.converged ? 1 : 0);
    row += buf;
    return row;
}

} // namespace mcf
