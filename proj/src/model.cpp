#include "silverify/model.hpp"

#include <cmath>
#include <stdexcept>

#include "kahan.hpp"

namespace silverify {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::domain_error(message);
}

}  // namespace

void Architecture::validate() const {
    require(m_required >= 1, "architecture: m_required must be >= 1");
    require(m_required <= n_elements, "architecture: m_required must be <= n_elements");
    require(n_elements <= kMaxElements, "architecture: n_elements must be <= 20");
}

void TestPolicy::validate() const {
    require(std::isfinite(full_test_period_hours) && full_test_period_hours > 0.0,
            "test policy: full_test_period_hours must be positive");
    require(partial_test_count >= 1, "test policy: partial_test_count must be >= 1");
    require(std::isfinite(partial_coverage) && partial_coverage >= 0.0 && partial_coverage <= 1.0,
            "test policy: partial_coverage must lie in [0, 1]");
}

double TestPolicy::last_partial_test_hours(double t_hours, bool left_limit) const {
    if (!has_partial_tests()) return 0.0;
    const double t0 = partial_period_hours();
    int p = static_cast<int>(std::floor(t_hours / t0));
    if (static_cast<double>(p + 1) * t0 <= t_hours) ++p;  // floor lost to rounding
    if (left_limit && p >= 1 && static_cast<double>(p) * t0 == t_hours) --p;
    if (p > partial_test_count - 1) p = partial_test_count - 1;
    if (p < 0) p = 0;
    return static_cast<double>(p) * t0;
}

double TestPolicy::effective_age(double t_hours, bool left_limit) const {
    return t_hours - partial_coverage * last_partial_test_hours(t_hours, left_limit);
}

void BarrierSpec::validate() const {
    architecture.validate();
    test_policy.validate();
    require(std::isfinite(failure_rate_per_hour) && failure_rate_per_hour >= 0.0,
            "barrier: failure_rate_per_hour must be >= 0");
}

std::int64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) throw std::domain_error("binomial: requires 0 <= k <= n");
    if (n > kMaxElements) throw std::domain_error("binomial: n must be <= 20");
    if (k > n - k) k = n - k;
    std::int64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;  // divides exactly at every step
    }
    return result;
}

std::int64_t coeff_S(int m, int n, int x) {
    if (!(1 <= m && m <= x && x <= n && n <= kMaxElements))
        throw std::domain_error("coeff_S: requires 1 <= M <= x <= N <= 20");
    std::int64_t inner = 0;
    for (int k = m; k <= x; ++k) {
        const std::int64_t sign = ((x - k) % 2 == 0) ? 1 : -1;
        inner += sign * binomial(x, k);
    }
    return binomial(n, x) * inner;
}

double coeff_T(int n, double coverage, double lambda, double t0_hours, int x) {
    if (n < 1) throw std::domain_error("coeff_T: requires n >= 1");
    if (!(coverage >= 0.0 && coverage <= 1.0)) throw std::domain_error("coeff_T: requires 0 <= E <= 1");
    if (!(lambda >= 0.0)) throw std::domain_error("coeff_T: requires lambda >= 0");
    if (!(t0_hours > 0.0)) throw std::domain_error("coeff_T: requires T0 > 0");
    if (x < 1) throw std::domain_error("coeff_T: requires x >= 1");
    detail::KahanSum sum;
    const long double decay =
        static_cast<long double>(x) * (1.0L - static_cast<long double>(coverage)) * lambda * t0_hours;
    for (int p = 0; p < n; ++p) {
        sum.add(expl(-decay * static_cast<long double>(p)));
    }
    return static_cast<double>(sum.value() / static_cast<long double>(n));
}

double coeff_V(int m, int n, int n_partial, double coverage) {
    if (!(1 <= m && m <= n && n <= kMaxElements))
        throw std::domain_error("coeff_V: requires 1 <= M <= N <= 20");
    if (n_partial < 1) throw std::domain_error("coeff_V: requires n >= 1");
    if (!(coverage >= 0.0 && coverage <= 1.0)) throw std::domain_error("coeff_V: requires 0 <= E <= 1");
    const int exponent = n - m + 2;
    const long double residual = 1.0L - static_cast<long double>(coverage);
    detail::KahanSum sum;
    for (int p = 0; p < n_partial; ++p) {
        const long double shift = residual * static_cast<long double>(p);
        sum.add(powl(1.0L + shift, exponent) - powl(shift, exponent));
    }
    return static_cast<double>(sum.value() / static_cast<long double>(n_partial));
}

}  // namespace silverify
