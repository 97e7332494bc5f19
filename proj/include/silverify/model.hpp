#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace silverify {

// Element count cap that keeps every binomial coefficient and voting sum
// exactly representable in 64-bit signed integers.
inline constexpr int kMaxElements = 20;

inline constexpr double kHoursPerYear = 8760.0;

// MooN voting: the barrier works iff at least m_required of n_elements work.
struct Architecture {
    int m_required = 1;  // M
    int n_elements = 1;  // N

    // Throws std::domain_error unless 1 <= M <= N <= kMaxElements.
    void validate() const;
};

// Proof-test schedule: a full test every full_test_period_hours (T1) renews
// the barrier; partial_test_count (n) splits [0, T1] into n equal intervals
// with partial tests at the n-1 interior instants, each revealing the
// partial_coverage (E) fraction of element failures.
struct TestPolicy {
    double full_test_period_hours = 8760.0;  // T1
    int partial_test_count = 1;              // n
    double partial_coverage = 0.0;           // E

    // Throws std::domain_error unless T1 > 0, n >= 1 and 0 <= E <= 1.
    void validate() const;

    // T0 = T1 / n, the spacing between consecutive test instants.
    double partial_period_hours() const { return full_test_period_hours / partial_test_count; }

    // n = 1 or E = 0 both mean the schedule degenerates to full tests only.
    bool has_partial_tests() const { return partial_test_count > 1 && partial_coverage > 0.0; }

    // Instant of the last partial test at or before t: p * T0 with
    // p = floor(t/T0) capped at n-1 (the event at T1 is the full test, and
    // no renewal is assumed when looking past T1). left_limit selects the
    // pre-test value when t falls exactly on a partial-test instant.
    // 0 when the schedule has no effective partial tests.
    double last_partial_test_hours(double t_hours, bool left_limit = false) const;

    // Age the element population has effectively accumulated at time t once
    // partial-test repairs are credited: t - E * last_partial_test_hours(t).
    double effective_age(double t_hours, bool left_limit = false) const;
};

// The single input to every evaluator.
struct BarrierSpec {
    Architecture architecture;
    double failure_rate_per_hour = 0.0;  // lambda, per element
    TestPolicy test_policy;

    // Throws std::domain_error on any field violation. lambda = 0 is
    // accepted as the degenerate never-failing barrier.
    void validate() const;
};

enum class Method { exact, approximate, simulated };

// A computed probability plus provenance: how it was obtained, any validity
// or clamping notes, and the standard error when simulated.
struct Evaluation {
    double value = 0.0;
    Method method = Method::exact;
    std::vector<std::string> warnings;
    std::optional<double> std_error;  // present iff method == simulated
};

// Exact binomial coefficient; requires 0 <= k <= n <= kMaxElements.
std::int64_t binomial(int n, int k);

// Voting sum S(M,N,x) = C(N,x) * sum_{k=M..x} C(x,k) (-1)^(x-k), the
// time-independent coefficient of the exact unavailability series.
// Requires 1 <= M <= x <= N <= kMaxElements; exact signed integer.
std::int64_t coeff_S(int m, int n, int x);

// Partial-test attenuation T = (1/n) sum_{p=0..n-1} exp(-x (1-E) lambda p T0),
// in (0, 1]. Requires n >= 1, 0 <= E <= 1, lambda >= 0, T0 > 0, x >= 1.
double coeff_T(int n, double coverage, double lambda, double t0_hours, int x);

// Partial-test inflation V = (1/n) sum_{p=0..n-1} [(1 + p(1-E))^(N-M+2)
// - (p(1-E))^(N-M+2)], >= 1. Requires 1 <= M <= N <= kMaxElements, n >= 1,
// 0 <= E <= 1.
double coeff_V(int m, int n, int n_partial, double coverage);

}  // namespace silverify
