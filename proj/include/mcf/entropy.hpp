#pragma once

#include "mcf/quantities.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mcf {

// F_{x0,t0}(M_t) = (4 pi t0)^{-n/2} int_{M_t} e^{-|x-x0|^2/(4 t0)} dmu_t,
// evaluated as the Huisken integral with center (x0, t + t0).
Real f_functional(const AncientFlow& flow, Real t, const AmbientVec& x0, Real t0,
                  const QuadConfig& cfg);

struct OptimizerConfig {
    int starts = 5;
    int max_iterations = 400;
    Real simplex_tol = 1e-6; // scaled simplex diameter
    Real value_tol = 1e-9;   // F spread across the simplex
    std::uint64_t seed = 0;
    QuadConfig quad;
};

struct StartTrace {
    int index = 0;
    Real best_value = 0;
    int iterations = 0;
    bool converged = false;
};

struct EntropyResult {
    Real t = 0;
    Real lambda = 0;
    AmbientVec argmax_x;
    Real argmax_t0 = 1;
    std::vector<StartTrace> starts;
    long evaluations = 0;
    bool converged = false;
};

// lambda(M_t) by multi-start Nelder-Mead over (x0 in the flow's search
// subspace, log t0). Deterministic for a fixed seed; never returns less than
// the best probed F value.
EntropyResult entropy_of_slice(const AncientFlow& flow, Real t, const OptimizerConfig& opt);

struct EntropySchedule {
    std::vector<EntropyResult> results;
    Real sup_estimate = 0;
    Real error_bar = 0;
    bool monotone = true; // nondecreasing as t decreases, within slack
};

// lambda along a decreasing schedule of times with the extrapolated sup.
EntropySchedule entropy_schedule(const AncientFlow& flow, const std::vector<Real>& times,
                                 const OptimizerConfig& opt);

std::string csv_header_entropy(int ambient_dim);
std::string csv_row(const EntropyResult& result);

} // namespace mcf
