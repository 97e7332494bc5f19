#pragma once

namespace silverify {

enum class DemandMode { low_demand, high_demand };

// SIL 4 is the safest band; none_above means the probability is better than
// the SIL 4 target range (architectural constraints outside this library
// still cap the achievable SIL), none_below means worse than SIL 1.
enum class SilLevel { none_below, sil1, sil2, sil3, sil4, none_above };

struct SilVerdict {
    DemandMode mode = DemandMode::low_demand;
    double probability = 0.0;
    SilLevel level = SilLevel::none_below;
};

// Low demand iff the demand rate is at most one per year AND at most twice
// the proof-test frequency (2 * 8760 / T1 per year). The governing text
// phrases the second clause as "twice the period", which is dimensionally
// inconsistent; this implements the intended frequency comparison.
DemandMode classify_demand_mode(double demand_rate_per_year, double full_test_period_hours);

// Half-open decade bands, lower bound inclusive: SIL4 [1e-5, 1e-4) ...
// SIL1 [1e-2, 1e-1) on the low-demand column.
SilVerdict sil_from_pfd(double pfd);

// High-demand column: SIL4 [1e-9, 1e-8) ... SIL1 [1e-6, 1e-5).
SilVerdict sil_from_pfh(double pfh);

const char* to_string(SilLevel level);
const char* to_string(DemandMode mode);

}  // namespace silverify
