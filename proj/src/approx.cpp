#include "silverify/approx.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "silverify/exact.hpp"

namespace silverify {

namespace {

void check_time(const BarrierSpec& spec, double t) {
    if (!(t >= 0.0 && t <= spec.test_policy.full_test_period_hours))
        throw std::domain_error("evaluator: t must lie in [0, T1]");
}

void require_basic(const BarrierSpec& spec, const char* op) {
    if (spec.test_policy.has_partial_tests()) {
        std::ostringstream oss;
        oss << op << ": defined for schedules without effective partial tests";
        throw std::domain_error(oss.str());
    }
}

void attach_validity(const BarrierSpec& spec, Evaluation& result) {
    const ValidityReport report = validity_report(spec);
    if (!report.within_domain) {
        std::ostringstream oss;
        oss << "approximation outside validity domain: lambda*T1 = " << report.lambda_t1
            << " >= " << ValidityReport::threshold;
        result.warnings.push_back(oss.str());
    }
}

double clamp_probability(double v, Evaluation& result) {
    if (v > 1.0) {
        result.warnings.push_back("polynomial value exceeded 1, clamped");
        return 1.0;
    }
    if (v < 0.0) return 0.0;
    return v;
}

}  // namespace

ValidityReport validity_report(const BarrierSpec& spec) {
    spec.validate();
    ValidityReport report;
    report.lambda_t1 = spec.failure_rate_per_hour * spec.test_policy.full_test_period_hours;
    report.within_domain = report.lambda_t1 < ValidityReport::threshold;
    return report;
}

Evaluation pfd_instant_approx(const BarrierSpec& spec, double t_hours, bool left_limit) {
    spec.validate();
    check_time(spec, t_hours);
    const int m = spec.architecture.m_required;
    const int n = spec.architecture.n_elements;
    const double tau = spec.test_policy.effective_age(t_hours, left_limit);
    const double v = static_cast<double>(binomial(n, m - 1)) *
                     std::pow(spec.failure_rate_per_hour * tau, n - m + 1);
    Evaluation result;
    result.method = Method::approximate;
    attach_validity(spec, result);
    result.value = clamp_probability(v, result);
    return result;
}

Evaluation pfd_average_approx(const BarrierSpec& spec) {
    spec.validate();
    const int m = spec.architecture.m_required;
    const int n = spec.architecture.n_elements;
    const TestPolicy& policy = spec.test_policy;
    const bool partial = policy.has_partial_tests();
    const double period = partial ? policy.partial_period_hours() : policy.full_test_period_hours;
    double v = static_cast<double>(binomial(n, m - 1)) *
               std::pow(spec.failure_rate_per_hour * period, n - m + 1) / (n - m + 2);
    if (partial) {
        v *= coeff_V(m, n, policy.partial_test_count, policy.partial_coverage);
    }
    Evaluation result;
    result.method = Method::approximate;
    attach_validity(spec, result);
    result.value = clamp_probability(v, result);
    return result;
}

double barrier_rate_approx(const BarrierSpec& spec, double t_hours) {
    spec.validate();
    require_basic(spec, "barrier_rate_approx");
    check_time(spec, t_hours);
    const int m = spec.architecture.m_required;
    const int n = spec.architecture.n_elements;
    return static_cast<double>(binomial(n, m)) * m *
           std::pow(spec.failure_rate_per_hour, n - m + 1) * std::pow(t_hours, n - m);
}

Evaluation pfh_average_approx(const BarrierSpec& spec) {
    spec.validate();
    require_basic(spec, "pfh_average_approx");
    const int m = spec.architecture.m_required;
    const int n = spec.architecture.n_elements;
    const double v = static_cast<double>(binomial(n, m - 1)) *
                     std::pow(spec.failure_rate_per_hour, n - m + 1) *
                     std::pow(spec.test_policy.full_test_period_hours, n - m);
    Evaluation result;
    result.method = Method::approximate;
    attach_validity(spec, result);
    result.value = clamp_probability(v, result);
    return result;
}

PfhFromPfdApprox pfh_from_pfd_approx(const BarrierSpec& spec) {
    spec.validate();
    require_basic(spec, "pfh_from_pfd_approx");
    const double t1 = spec.test_policy.full_test_period_hours;
    const int span = spec.architecture.n_elements - spec.architecture.m_required + 2;

    PfhFromPfdApprox result;
    result.from_final_pfd.method = Method::approximate;
    attach_validity(spec, result.from_final_pfd);
    result.from_final_pfd.value =
        clamp_probability(pfd_instant_left(spec, t1) / t1, result.from_final_pfd);

    result.from_average_pfd.method = Method::approximate;
    attach_validity(spec, result.from_average_pfd);
    result.from_average_pfd.value =
        clamp_probability(pfd_average(spec) * span / t1, result.from_average_pfd);
    return result;
}

}  // namespace silverify
