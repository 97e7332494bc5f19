#pragma once

namespace silverify::detail {

// Kahan compensated accumulator. The analytic formulas subtract near-equal
// order-1 quantities to produce results of order 1e-5 and below, so every
// series here is accumulated in long double with compensation.
struct KahanSum {
    long double sum = 0.0L;
    long double carry = 0.0L;

    void add(long double term) {
        const long double y = term - carry;
        const long double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }

    long double value() const { return sum; }
};

}  // namespace silverify::detail
