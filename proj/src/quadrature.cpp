#include "silverify/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "silverify/errors.hpp"

namespace silverify {

namespace {

using Fn = std::function<double(double)>;

long double simpson(long double fa, long double fm, long double fb, long double h) {
    return h / 6.0L * (fa + 4.0L * fm + fb);
}

long double adapt(const Fn& f, long double a, long double b, long double fa, long double fm,
                  long double fb, long double whole, long double tol, int depth) {
    const long double m = (a + b) / 2.0L;
    const long double lm = (a + m) / 2.0L;
    const long double rm = (m + b) / 2.0L;
    const long double flm = f(static_cast<double>(lm));
    const long double frm = f(static_cast<double>(rm));
    const long double left = simpson(fa, flm, fm, m - a);
    const long double right = simpson(fm, frm, fb, b - m);
    const long double delta = left + right - whole;
    if (std::fabs(static_cast<double>(delta)) <= 15.0L * tol) {
        return left + right + delta / 15.0L;
    }
    if (depth <= 0) {
        std::ostringstream oss;
        oss << "quadrature: recursion depth exhausted on [" << static_cast<double>(a) << ", "
            << static_cast<double>(b) << "], local error estimate "
            << static_cast<double>(std::fabs(delta) / 15.0L);
        throw NumericalError(oss.str());
    }
    return adapt(f, a, m, fa, flm, fm, left, tol / 2.0L, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, tol / 2.0L, depth - 1);
}

long double integrate_piece(const Fn& f, double a, double b, double tol, int max_depth) {
    const long double fa = f(a);
    const long double fb = f(b);
    const long double m = (static_cast<long double>(a) + b) / 2.0L;
    const long double fm = f(static_cast<double>(m));
    const long double whole = simpson(fa, fm, fb, static_cast<long double>(b) - a);
    return adapt(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace

double integrate(const Fn& f, double a, double b, const QuadratureOptions& options,
                 const std::vector<double>& breakpoints) {
    if (!(b >= a)) throw std::domain_error("integrate: requires b >= a");
    if (a == b) return 0.0;

    std::vector<double> cuts;
    cuts.push_back(a);
    for (double c : breakpoints) {
        if (c > a && c < b) cuts.push_back(c);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    const double min_gap = (b - a) * 1e-12;

    long double total = 0.0L;
    double left = cuts.front();
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double right = cuts[i];
        if (right - left < min_gap && i + 1 < cuts.size()) continue;  // merge degenerate slivers
        const double tol = options.abs_tol * ((right - left) / (b - a));
        total += integrate_piece(f, left, right, tol, options.max_depth);
        left = right;
    }
    return static_cast<double>(total);
}

}  // namespace silverify
