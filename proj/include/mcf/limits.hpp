#pragma once

#include "mcf/entropy.hpp"
#include "mcf/quantities.hpp"

#include <string>
#include <vector>

namespace mcf {

enum class Verdict { pass, pass_both_diverge, fail_mismatch, degraded };

std::string to_string(Verdict v);

struct SeriesPoint {
    Real parameter = 0;
    Real value = 0;
    Real error = 0;
    bool converged = true;
};

struct LimitComparisonReport {
    std::string flow;
    int n = 1;

    std::vector<SeriesPoint> ecker;          // A(M cap E_r)/r^n over the r schedule
    std::vector<SeriesPoint> huisken;        // int Phi over the t schedule
    std::vector<SeriesPoint> huisken_paired; // int Phi at t = -r^2/4 per scheduled r

    Real ecker_limit = 0, ecker_bar = 0;
    Real huisken_limit = 0, huisken_bar = 0;

    bool ecker_monotone = true;   // nondecreasing in r, slack 1e-6
    bool huisken_monotone = true; // nonincreasing in t, slack 1e-6
    bool upper_bound_ok = true;   // A/r^n <= Huisken at t = -r^2/4 + 1e-6
    bool finite = true;           // every point converged and finite
    bool ecker_diverges = false;
    bool huisken_diverges = false;

    Verdict verdict = Verdict::pass;
    Real margin = 0; // |ecker_limit - huisken_limit| - (ecker_bar + huisken_bar)
};

std::vector<Real> default_r_schedule();
std::vector<Real> default_t_schedule();

// divergence classification per the report contract: value beyond 1e6 with a
// last-increment ratio of at least 1/2
bool classify_divergence(const std::vector<Real>& values);

LimitComparisonReport verify_limit_agreement(const AncientFlow& flow, const std::vector<Real>& r_schedule,
                               const std::vector<Real>& t_schedule, const QuadConfig& cfg,
                               int threads = 1);

struct EntropyComparisonReport {
    LimitComparisonReport limits;
    std::vector<SeriesPoint> lambda; // entropy over the t schedule
    Real sup_lambda = 0, lambda_bar = 0;
    bool three_way_pass = false;
    Real worst_gap = 0;
};

EntropyComparisonReport verify_entropy_agreement(const AncientFlow& flow,
                                     const std::vector<Real>& r_schedule,
                                     const std::vector<Real>& t_schedule,
                                     const std::vector<Real>& entropy_times,
                                     const QuadConfig& cfg, const OptimizerConfig& opt,
                                     int threads = 1);

struct IntegratedHuiskenReport {
    Real lhs = 0;      // int Phi at theta minus int Phi at tau
    Real rhs = 0;      // minus the deficit over [tau, theta]
    Real residual = 0; // |lhs - rhs|
    Real relative = 0;
};

IntegratedHuiskenReport verify_integrated_huisken(const AncientFlow& flow, Real tau, Real theta,
                                                  const QuadConfig& cfg);

std::string limit_report_json(const LimitComparisonReport& rep);
std::string entropy_report_json(const EntropyComparisonReport& rep);
std::string series_csv(const LimitComparisonReport& rep);
std::string series_csv(const EntropyComparisonReport& rep);

} // namespace mcf
