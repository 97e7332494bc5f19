#include "silverify/sil.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "silverify/model.hpp"

namespace silverify {

namespace {

// bounds[0] is the inclusive lower bound of the SIL 4 band; bounds[4] the
// exclusive upper bound of SIL 1. Literal decade constants, so an exact
// boundary value always lands in its own band.
SilLevel band(double p, const double (&bounds)[5]) {
    if (p < bounds[0]) return SilLevel::none_above;
    if (p < bounds[1]) return SilLevel::sil4;
    if (p < bounds[2]) return SilLevel::sil3;
    if (p < bounds[3]) return SilLevel::sil2;
    if (p < bounds[4]) return SilLevel::sil1;
    return SilLevel::none_below;
}

constexpr double kPfdBounds[5] = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
constexpr double kPfhBounds[5] = {1e-9, 1e-8, 1e-7, 1e-6, 1e-5};

void check_probability(double p, const char* op) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string(op) + ": requires p in [0, 1]");
}

}  // namespace

DemandMode classify_demand_mode(double demand_rate_per_year, double full_test_period_hours) {
    if (!(demand_rate_per_year > 0.0) || !std::isfinite(demand_rate_per_year))
        throw std::domain_error("classify_demand_mode: demand rate must be positive");
    if (!(full_test_period_hours > 0.0) || !std::isfinite(full_test_period_hours))
        throw std::domain_error("classify_demand_mode: test period must be positive");
    const double test_frequency_per_year = kHoursPerYear / full_test_period_hours;
    const bool low = demand_rate_per_year <= 1.0 &&
                     demand_rate_per_year <= 2.0 * test_frequency_per_year;
    return low ? DemandMode::low_demand : DemandMode::high_demand;
}

SilVerdict sil_from_pfd(double pfd) {
    check_probability(pfd, "sil_from_pfd");
    return {DemandMode::low_demand, pfd, band(pfd, kPfdBounds)};
}

SilVerdict sil_from_pfh(double pfh) {
    check_probability(pfh, "sil_from_pfh");
    return {DemandMode::high_demand, pfh, band(pfh, kPfhBounds)};
}

const char* to_string(SilLevel level) {
    switch (level) {
        case SilLevel::none_below: return "none_below";
        case SilLevel::sil1: return "SIL1";
        case SilLevel::sil2: return "SIL2";
        case SilLevel::sil3: return "SIL3";
        case SilLevel::sil4: return "SIL4";
        case SilLevel::none_above: return "none_above";
    }
    return "?";
}

const char* to_string(DemandMode mode) {
    return mode == DemandMode::low_demand ? "low_demand" : "high_demand";
}

}  // namespace silverify
