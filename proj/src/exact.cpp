#include "silverify/exact.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kahan.hpp"
#include "silverify/errors.hpp"
#include "silverify/quadrature.hpp"

namespace silverify {

namespace {

void check_time(const BarrierSpec& spec, double t) {
    if (!(t >= 0.0 && t <= spec.test_policy.full_test_period_hours))
        throw std::domain_error("evaluator: t must lie in [0, T1]");
}

// Unavailability at effective age tau, computed as the lower tail of the
// voting binomial: sum_{k=0..M-1} C(N,k) e^(-k lambda tau) q^(N-k) with
// q = 1 - e^(-lambda tau). Every term is positive, so the order-1e-5
// results never come from cancelling order-1 quantities.
long double unavailability_at_age(int m, int n, double lambda, double tau) {
    const long double x = static_cast<long double>(lambda) * tau;
    const long double q = -expm1l(-x);
    const long double s = 1.0L - q;  // e^(-lambda tau)
    detail::KahanSum sum;
    for (int k = 0; k < m; ++k) {
        sum.add(static_cast<long double>(binomial(n, k)) * powl(s, k) * powl(q, n - k));
    }
    long double v = sum.value();
    if (v < 0.0L) v = 0.0L;
    if (v > 1.0L) v = 1.0L;
    return v;
}

// Complementary upper tail (the availability); shares the stability of the
// form above and partitions unity with it.
long double availability_at_age(int m, int n, double lambda, double tau) {
    const long double x = static_cast<long double>(lambda) * tau;
    const long double q = -expm1l(-x);
    const long double s = 1.0L - q;
    detail::KahanSum sum;
    for (int k = m; k <= n; ++k) {
        sum.add(static_cast<long double>(binomial(n, k)) * powl(s, k) * powl(q, n - k));
    }
    long double v = sum.value();
    if (v < 0.0L) v = 0.0L;
    if (v > 1.0L) v = 1.0L;
    return v;
}

// Availability at time t with the test schedule applied, extended past T1
// with the age frozen at the last interior partial test (no renewal in the
// lookahead window).
long double availability_at_time(const BarrierSpec& spec, double t) {
    const double tau = spec.test_policy.effective_age(t);
    return availability_at_age(spec.architecture.m_required, spec.architecture.n_elements,
                               spec.failure_rate_per_hour, tau);
}

// 1 - (1 - e^(-u)) / u, the complement of the averaging weight, stable for
// small u where the direct quotient would cancel.
long double one_minus_avg_weight(long double u) {
    if (u < 0.0L) throw std::domain_error("averaging weight: requires u >= 0");
    if (u < 1e-3L) {
        // series: u/2 - u^2/6 + u^3/24 - u^4/120
        return u * (0.5L + u * (-1.0L / 6.0L + u * (1.0L / 24.0L - u / 120.0L)));
    }
    return (u + expm1l(-u)) / u;
}

long double raw_pfh(const BarrierSpec& spec, double t) {
    const long double at = availability_at_time(spec, t);
    if (!(at > 0.0L)) {
        std::ostringstream oss;
        oss << "pfh: availability vanished at t = " << t << " h; the conditional one-hour "
            << "unreliability is singular";
        throw NumericalError(oss.str());
    }
    const long double next = availability_at_time(spec, t + 1.0);
    return 1.0L - next / at;
}

}  // namespace

double reliability(const BarrierSpec& spec, double t_hours) {
    spec.validate();
    if (spec.test_policy.has_partial_tests())
        throw std::domain_error("reliability: defined for schedules without effective partial tests");
    check_time(spec, t_hours);
    return static_cast<double>(availability_at_age(spec.architecture.m_required,
                                                   spec.architecture.n_elements,
                                                   spec.failure_rate_per_hour, t_hours));
}

double pfd_instant(const BarrierSpec& spec, double t_hours) {
    spec.validate();
    check_time(spec, t_hours);
    const double tau = spec.test_policy.effective_age(t_hours);
    return static_cast<double>(unavailability_at_age(spec.architecture.m_required,
                                                     spec.architecture.n_elements,
                                                     spec.failure_rate_per_hour, tau));
}

double pfd_instant_left(const BarrierSpec& spec, double t_hours) {
    spec.validate();
    check_time(spec, t_hours);
    const double tau = spec.test_policy.effective_age(t_hours, /*left_limit=*/true);
    return static_cast<double>(unavailability_at_age(spec.architecture.m_required,
                                                     spec.architecture.n_elements,
                                                     spec.failure_rate_per_hour, tau));
}

double pfd_average(const BarrierSpec& spec) {
    spec.validate();
    const int m = spec.architecture.m_required;
    const int n = spec.architecture.n_elements;
    const long double lambda = spec.failure_rate_per_hour;
    const TestPolicy& policy = spec.test_policy;

    // Complement form: since sum_x S(M,N,x) = 1, the average equals
    // sum_x S_x * [(1 - T_x) + T_x * (1 - w(x lambda T0))] with
    // w(u) = (1 - e^(-u))/u, avoiding the 1 - (near 1) subtraction.
    const bool partial = policy.has_partial_tests();
    const int np = partial ? policy.partial_test_count : 1;
    const double t0 = partial ? policy.partial_period_hours() : policy.full_test_period_hours;

    detail::KahanSum acc;
    for (int x = m; x <= n; ++x) {
        const long double s_x = static_cast<long double>(coeff_S(m, n, x));
        const long double u = static_cast<long double>(x) * lambda * t0;
        const long double one_minus_w = one_minus_avg_weight(u);
        long double t_x = 1.0L;
        long double one_minus_t = 0.0L;
        if (partial) {
            const long double decay =
                static_cast<long double>(x) * (1.0L - static_cast<long double>(policy.partial_coverage)) *
                lambda * t0;
            detail::KahanSum ts;
            detail::KahanSum cs;
            for (int p = 0; p < np; ++p) {
                const long double e = -decay * static_cast<long double>(p);
                ts.add(expl(e));
                cs.add(-expm1l(e));
            }
            t_x = ts.value() / np;
            one_minus_t = cs.value() / np;
        }
        acc.add(s_x * (one_minus_t + t_x * one_minus_w));
    }
    long double v = acc.value();
    if (v < 0.0L) v = 0.0L;
    if (v > 1.0L) v = 1.0L;
    return static_cast<double>(v);
}

Evaluation pfh_instant(const BarrierSpec& spec, double t_hours) {
    spec.validate();
    check_time(spec, t_hours);
    const long double raw = raw_pfh(spec, t_hours);
    Evaluation result;
    result.method = Method::exact;
    if (raw < 0.0L) {
        std::ostringstream oss;
        oss << "one-hour window starting at t = " << t_hours
            << " h straddles a partial test; negative raw value clamped to 0";
        result.warnings.push_back(oss.str());
        result.value = 0.0;
    } else {
        result.value = static_cast<double>(raw > 1.0L ? 1.0L : raw);
    }
    return result;
}

Evaluation pfh_average(const BarrierSpec& spec) {
    spec.validate();
    const TestPolicy& policy = spec.test_policy;
    const double t1 = policy.full_test_period_hours;
    const int m = spec.architecture.m_required;
    const int n = spec.architecture.n_elements;
    const double lambda = spec.failure_rate_per_hour;
    const double coverage = policy.partial_coverage;

    // Piece boundaries: every instant where t or t + 1h crosses a partial
    // test. Inside a piece both last-test instants are constant, so the
    // branch-pinned integrand below is analytic on the closed piece; a
    // right-continuous evaluation instead would leave an endpoint jump that
    // proportional-tolerance refinement can never accept.
    std::vector<double> cuts{0.0, t1};
    if (policy.has_partial_tests()) {
        const double t0 = policy.partial_period_hours();
        for (int p = 1; p < policy.partial_test_count; ++p) {
            const double q = p * t0;
            if (q > 0.0 && q < t1) cuts.push_back(q);
            if (q - 1.0 > 0.0 && q - 1.0 < t1) cuts.push_back(q - 1.0);
        }
    }
    if (t1 - 1.0 > 0.0) cuts.push_back(t1 - 1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const QuadratureOptions options{1e-12 * t1, 40};  // 1e-12 on the averaged result

    long long clamped = 0;
    detail::KahanSum total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        if (!(b > a)) continue;
        const double mid = a + (b - a) / 2.0;
        const double last_now = policy.last_partial_test_hours(mid);
        const double last_look = policy.last_partial_test_hours(mid + 1.0);
        const auto raw = [&](double t) {
            const long double at = availability_at_age(m, n, lambda, t - coverage * last_now);
            if (!(at > 0.0L)) {
                std::ostringstream oss;
                oss << "pfh: availability vanished at t = " << t
                    << " h; the conditional one-hour unreliability is singular";
                throw NumericalError(oss.str());
            }
            const long double next =
                availability_at_age(m, n, lambda, t + 1.0 - coverage * last_look);
            return static_cast<double>(1.0L - next / at);
        };
        // The effective-age offset between t and t+1h is constant on the
        // piece, so the raw value keeps one sign throughout: negative
        // exactly when the window contains a repair worth more than an hour
        // of aging (E*T0 > 1h).
        if (raw(mid) <= 0.0) {
            ++clamped;
            continue;
        }
        QuadratureOptions piece = options;
        piece.abs_tol = options.abs_tol * ((b - a) / t1);
        total.add(integrate(raw, a, b, piece));
    }

    Evaluation result;
    result.method = Method::exact;
    double v = static_cast<double>(total.value()) / t1;
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    result.value = v;
    if (clamped > 0) {
        std::ostringstream oss;
        oss << clamped << " one-hour window span(s) straddling partial tests have negative raw "
            << "values; clamped to 0";
        result.warnings.push_back(oss.str());
    }
    return result;
}

std::vector<CurvePoint> pfd_curve(const BarrierSpec& spec, int samples_per_period) {
    spec.validate();
    if (samples_per_period < 2) throw std::domain_error("pfd_curve: requires samples_per_period >= 2");

    const TestPolicy& policy = spec.test_policy;
    const double t1 = policy.full_test_period_hours;
    const int segments = policy.has_partial_tests() ? policy.partial_test_count : 1;
    const double t0 = t1 / segments;

    std::vector<CurvePoint> points;
    points.reserve(static_cast<std::size_t>(segments) * samples_per_period);
    for (int seg = 0; seg < segments; ++seg) {
        const double start = seg * t0;
        const double end = (seg == segments - 1) ? t1 : (seg + 1) * t0;
        for (int j = 0; j < samples_per_period; ++j) {
            const bool last = (j == samples_per_period - 1);
            const double t = last ? end : start + (end - start) * j / (samples_per_period - 1);
            const double v = last ? pfd_instant_left(spec, t) : pfd_instant(spec, t);
            points.push_back({t, v});
        }
    }
    return points;
}

}  // namespace silverify
