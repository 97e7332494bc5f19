#pragma once

#include "silverify/model.hpp"

namespace silverify {

// Small lambda*T1 validity guard shared by every approximation. Values
// outside the domain are still computed; the report is attached as a
// warning, never an error, so sweeps can cross the boundary.
struct ValidityReport {
    static constexpr double threshold = 1e-2;
    double lambda_t1 = 0.0;
    bool within_domain = true;
};

ValidityReport validity_report(const BarrierSpec& spec);

// First-order unavailability C(N,M-1) (lambda * age)^(N-M+1) at the
// effective age of t; conservative (never below the exact value) inside the
// validity domain. Clamped to [0, 1]. left_limit evaluates the pre-test
// value at test instants, for sawtooth curve emission.
Evaluation pfd_instant_approx(const BarrierSpec& spec, double t_hours, bool left_limit = false);

// First-order average: basic C(N,M-1) (lambda T1)^(N-M+1) / (N-M+2);
// with partial tests the same expression at T0, inflated by coeff_V.
Evaluation pfd_average_approx(const BarrierSpec& spec);

// Barrier failure rate C(N,M) M lambda^(N-M+1) t^(N-M), per hour.
// Defined for schedules without effective partial tests.
double barrier_rate_approx(const BarrierSpec& spec, double t_hours);

// One-hour failure probability C(N,M-1) lambda^(N-M+1) T1^(N-M) * 1h,
// the time average of barrier_rate_approx. Basic schedules only.
Evaluation pfh_average_approx(const BarrierSpec& spec);

// The two probability-to-probability bridges, both built from the exact
// unavailability: final-value form PFD(T1)/T1 * 1h and average form
// PFD_avg (N-M+2)/T1 * 1h. They agree with each other and with
// pfh_average_approx inside the validity domain. Basic schedules only.
struct PfhFromPfdApprox {
    Evaluation from_final_pfd;
    Evaluation from_average_pfd;
};

PfhFromPfdApprox pfh_from_pfd_approx(const BarrierSpec& spec);

}  // namespace silverify
