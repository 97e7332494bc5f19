#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "silverify/model.hpp"

namespace silverify::mc {

struct SimulationConfig {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    int grid_points = 100;  // time grid resolution over (0, T1]
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

// Execution backend for the batch loop. Results are bitwise identical
// across backends: every batch owns a private random stream derived from
// (seed, batch index) and partial results merge in batch-index order.
enum class Exec { serial, parallel };

// Half-open element down-time interval [begin, end) within [0, T1).
struct Interval {
    double begin = 0.0;
    double end = 0.0;

    bool operator==(const Interval&) const = default;
};

// One element lifetime over [0, T1). The coverage fraction E splits the
// element failure rate into two competing exponential modes: rate E*lambda
// failures are cleared at every partial test, rate (1-E)*lambda failures
// only at the full test. This mode split, not per-test Bernoulli detection,
// is what reproduces the analytic partial-test unavailability; the
// per-test-detection alternative leaves geometric residuals with a
// different law.
std::vector<Interval> simulate_element_history(double lambda, double coverage,
                                               const TestPolicy& policy, std::mt19937_64& rng);

struct PfdEstimate {
    std::vector<double> grid_times;      // i*T1/G, i = 1..G; t = T1 reads as the left limit
    std::vector<Estimate> at_time;       // fraction of trials unavailable at each grid time
    Estimate average;                    // mean per-trial downtime fraction over [0, T1)
};

PfdEstimate estimate_pfd(const BarrierSpec& spec, const SimulationConfig& config,
                         Exec exec = Exec::parallel);

// Conditional one-hour unreliability, averaged over window starts drawn
// uniformly in [0, T1]: given the barrier is up at t, the probability that
// it fails somewhere in (t, t+1h]. Start states are sampled exactly from
// the element-state law conditioned on the barrier being up (no rejection),
// then the window is simulated forward with partial-test repairs; no
// renewal is applied inside a window that crosses T1. Throws
// NumericalError when the conditioning probability underflows (barrier
// essentially never up).
Estimate estimate_pfh(const BarrierSpec& spec, const SimulationConfig& config,
                      Exec exec = Exec::parallel);

// Pooled estimate over independent runs (weighted mean; variances combined
// by the parallel-variance rule).
Estimate pool(const Estimate& a, const Estimate& b);

}  // namespace silverify::mc
