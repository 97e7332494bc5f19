#pragma once

#include <functional>
#include <vector>

namespace silverify {

struct QuadratureOptions {
    double abs_tol = 1e-12;  // on the whole integral
    int max_depth = 40;
};

// Adaptive Simpson integration of f over [a, b]. Breakpoints inside (a, b)
// force subdivision boundaries so that integrand kinks and jumps (test
// instants, lookahead shadows) never sit inside an adapted interval; the
// tolerance is distributed over the pieces by length. Throws NumericalError
// with interval diagnostics if the recursion depth limit is reached.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options = {},
                 const std::vector<double>& breakpoints = {});

}  // namespace silverify
