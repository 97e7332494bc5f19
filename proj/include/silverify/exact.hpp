#pragma once

#include <vector>

#include "silverify/model.hpp"

namespace silverify {

struct CurvePoint {
    double t_hours = 0.0;
    double value = 0.0;
};

// Barrier reliability R(t) = sum_{k=M..N} C(N,k) e^(-k lambda t) (1 - e^(-lambda t))^(N-k).
// Defined for schedules without effective partial tests; 0 <= t <= T1.
double reliability(const BarrierSpec& spec, double t_hours);

// Instantaneous unavailability PFD(t) on [0, T1]. Right-continuous at
// partial-test instants (the post-test value); t = T1 reports the left
// limit, since the full test there renews the barrier.
double pfd_instant(const BarrierSpec& spec, double t_hours);

// Pre-test left limit of PFD at t; differs from pfd_instant only exactly at
// partial-test instants. Used to render the sawtooth curve.
double pfd_instant_left(const BarrierSpec& spec, double t_hours);

// Time average of PFD over [0, T1], closed form.
double pfd_average(const BarrierSpec& spec);

// One-hour conditional unreliability: 1 - (1 - PFD(t+1h)) / (1 - PFD(t)).
// The unavailability is extended past T1 by the same expression with no
// renewal inside the lookahead window. A window straddling a partial test
// can make the raw value negative (the test removes failures); it is then
// clamped to 0 and the clamp recorded in the warnings.
Evaluation pfh_instant(const BarrierSpec& spec, double t_hours);

// Average of pfh_instant over [0, T1] by adaptive quadrature, split at
// every partial-test instant, its one-hour shadow, and T1 - 1h.
Evaluation pfh_average(const BarrierSpec& spec);

// Samples pfd_instant on a uniform grid within each inter-test interval,
// emitting the pre-test left limit and the post-test value at each
// partial-test instant (two points with equal t at every jump).
std::vector<CurvePoint> pfd_curve(const BarrierSpec& spec, int samples_per_period);

}  // namespace silverify
