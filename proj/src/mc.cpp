#include "silverify/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "silverify/errors.hpp"

namespace silverify::mc {

namespace {

constexpr std::uint64_t kBatchSize = 16384;
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream for batch k of a run: disjoint, deterministic, independent of the
// execution backend.
std::mt19937_64 batch_rng(std::uint64_t seed, std::uint64_t k) {
    return std::mt19937_64(splitmix64(seed + (k + 1) * kGolden));
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

// Inverse-CDF exponential draw; +inf when the rate is zero so a mode that
// cannot fire never produces an event.
double exponential(std::mt19937_64& rng, double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-uniform01(rng)) / rate;
}

std::uint64_t batch_count(std::uint64_t total) { return (total + kBatchSize - 1) / kBatchSize; }

std::uint64_t batch_trials(std::uint64_t total, std::uint64_t k) {
    return std::min(kBatchSize, total - k * kBatchSize);
}

void check_config(const SimulationConfig& config) {
    if (config.trials < 1) throw std::domain_error("simulation: trials must be >= 1");
    if (config.grid_points < 1) throw std::domain_error("simulation: grid_points must be >= 1");
}

// Sorts by begin and coalesces overlapping or touching intervals, so one
// element never contributes twice to the barrier down-count.
void merge_intervals(std::vector<Interval>& intervals) {
    if (intervals.size() < 2) return;
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
    std::size_t out = 0;
    for (std::size_t i = 1; i < intervals.size(); ++i) {
        if (intervals[i].begin <= intervals[out].end) {
            intervals[out].end = std::max(intervals[out].end, intervals[i].end);
        } else {
            intervals[++out] = intervals[i];
        }
    }
    intervals.resize(out + 1);
}

template <typename Batch, typename Runner>
std::vector<Batch> run_batches(std::uint64_t n_batches, Exec exec, const Runner& runner) {
    std::vector<Batch> parts(n_batches);
#ifdef _OPENMP
    if (exec == Exec::parallel) {
        std::exception_ptr failure;
        #pragma omp parallel for schedule(dynamic)
        for (long long k = 0; k < static_cast<long long>(n_batches); ++k) {
            try {
                parts[k] = runner(static_cast<std::uint64_t>(k));
            } catch (...) {
                #pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        return parts;
    }
#else
    (void)exec;
#endif
    for (std::uint64_t k = 0; k < n_batches; ++k) parts[k] = runner(k);
    return parts;
}

Estimate bernoulli_estimate(std::uint64_t hits, std::uint64_t n) {
    Estimate e;
    e.trials = n;
    e.mean = static_cast<double>(hits) / static_cast<double>(n);
    e.std_error = std::sqrt(std::max(e.mean * (1.0 - e.mean), 0.0) / static_cast<double>(n));
    return e;
}

// ---------------------------------------------------------------------------
// PFD estimation: full lifetimes over [0, T1), grid states and downtime.
// ---------------------------------------------------------------------------

struct PfdBatch {
    std::vector<std::uint64_t> down_at;  // per grid point
    double frac_sum = 0.0;
    double frac_sq_sum = 0.0;
};

PfdBatch run_pfd_batch(const BarrierSpec& spec, int grid, std::uint64_t trials,
                       std::mt19937_64 rng) {
    const double t1 = spec.test_policy.full_test_period_hours;
    const int threshold = spec.architecture.n_elements - spec.architecture.m_required + 1;
    const auto grid_time = [&](int i) { return static_cast<double>(i) * t1 / grid; };

    PfdBatch batch;
    batch.down_at.assign(grid, 0);

    std::vector<std::pair<double, int>> events;  // (-1 end) sorts before (+1 begin) at equal time
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        events.clear();
        for (int e = 0; e < spec.architecture.n_elements; ++e) {
            for (const Interval& iv :
                 simulate_element_history(spec.failure_rate_per_hour,
                                          spec.test_policy.partial_coverage,
                                          spec.test_policy, rng)) {
                events.emplace_back(iv.begin, +1);
                events.emplace_back(iv.end, -1);
            }
        }
        if (events.empty()) continue;
        std::sort(events.begin(), events.end());

        double downtime = 0.0;
        int down = 0;
        double seg_start = 0.0;
        bool in_down = false;
        for (const auto& [time, delta] : events) {
            down += delta;
            if (!in_down && down >= threshold) {
                seg_start = time;
                in_down = true;
            } else if (in_down && down < threshold) {
                // barrier-down segment [seg_start, time); grid point t_i is
                // covered when seg_start <= t_i < time, and t_G = T1 also
                // counts when the segment runs into the horizon (the grid
                // endpoint reads as the left limit).
                downtime += time - seg_start;
                int i = static_cast<int>(seg_start / t1 * grid);
                if (i < 1) i = 1;
                while (i <= grid && grid_time(i) < seg_start) ++i;
                while (i <= grid && (grid_time(i) < time || (i == grid && time >= t1))) {
                    ++batch.down_at[i - 1];
                    ++i;
                }
                in_down = false;
            }
        }
        const double frac = downtime / t1;
        batch.frac_sum += frac;
        batch.frac_sq_sum += frac * frac;
    }
    return batch;
}

// ---------------------------------------------------------------------------
// PFH estimation: conditional window sampling.
// ---------------------------------------------------------------------------

struct PfhBatch {
    std::uint64_t fails = 0;
};

// Element states at the window start, conditioned on the barrier being up.
struct StartState {
    int up_count = 0;  // neither mode failed
    int down_u = 0;    // unrepairable mode failed: down for the whole window
    int down_d = 0;    // only the repairable mode failed: repaired at the next test
};

StartState sample_start_state(const BarrierSpec& spec, double t, std::mt19937_64& rng) {
    const int m = spec.architecture.m_required;
    const int n = spec.architecture.n_elements;
    const double lambda = spec.failure_rate_per_hour;
    const TestPolicy& policy = spec.test_policy;

    const double last_test = policy.last_partial_test_hours(t);
    const double rate_u = (1.0 - policy.partial_coverage) * lambda;
    const double rate_d = policy.partial_coverage * lambda;
    const long double pi = expl(-static_cast<long double>(lambda) * policy.effective_age(t));

    // Number of up elements U ~ Binomial(N, pi) conditioned on U >= M,
    // drawn by inverse CDF over the truncated support.
    long double weights[kMaxElements + 1];
    long double mass = 0.0L;
    for (int k = m; k <= n; ++k) {
        weights[k] = static_cast<long double>(binomial(n, k)) * powl(pi, k) * powl(1.0L - pi, n - k);
        mass += weights[k];
    }
    if (!(mass > 1e-280L) || !std::isfinite(static_cast<double>(mass))) {
        std::ostringstream oss;
        oss << "estimate_pfh: conditioning probability underflowed at t = " << t
            << " h (element availability " << static_cast<double>(pi) << ", architecture " << m
            << "oo" << n << "); the barrier is essentially never up";
        throw NumericalError(oss.str());
    }
    long double r = static_cast<long double>(uniform01(rng)) * mass;
    int up = n;
    for (int k = m; k <= n; ++k) {
        if (r < weights[k]) {
            up = k;
            break;
        }
        r -= weights[k];
    }

    StartState state;
    state.up_count = up;
    // Cause split for a down element: the modes are independent, so given
    // at least one failed, P(unrepairable failed) = a / (a + b - a*b) with
    // a = P(u failed by t) and b = P(d failed since the last partial test).
    // When the unrepairable mode is down the d state is irrelevant: the
    // element cannot recover inside the window either way.
    const double a = -std::expm1(-rate_u * t);
    const double b = -std::expm1(-rate_d * (t - last_test));
    const double down_mass = a + b - a * b;
    for (int e = up; e < n; ++e) {
        if (uniform01(rng) * down_mass < a) {
            ++state.down_u;
        } else {
            ++state.down_d;
        }
    }
    return state;
}

// Simulates the window (t, t+1h] forward from a conditioned start state and
// reports whether the barrier is down at any point inside it.
bool window_fails(const BarrierSpec& spec, double t, const StartState& state,
                  std::mt19937_64& rng, std::vector<double>& tests,
                  std::vector<Interval>& element, std::vector<std::pair<double, int>>& events) {
    const TestPolicy& policy = spec.test_policy;
    const double rate_u = (1.0 - policy.partial_coverage) * spec.failure_rate_per_hour;
    const double rate_d = policy.partial_coverage * spec.failure_rate_per_hour;
    const double end = t + 1.0;
    const int threshold = spec.architecture.n_elements - spec.architecture.m_required + 1;

    // Interior partial tests inside (t, t+1h]; the full test never repairs
    // inside a window (no renewal in the lookahead).
    tests.clear();
    if (policy.has_partial_tests()) {
        const double t0 = policy.partial_period_hours();
        for (int p = 1; p < policy.partial_test_count; ++p) {
            const double q = p * t0;
            if (q > t && q <= end) tests.push_back(q);
        }
    }

    events.clear();
    int count0 = state.down_u;  // down across the whole window

    const auto emit = [&](std::vector<Interval>& intervals) {
        merge_intervals(intervals);
        for (const Interval& iv : intervals) {
            if (iv.begin <= t) {
                ++count0;
            } else {
                events.emplace_back(iv.begin, +1);
            }
            if (iv.end < end) events.emplace_back(iv.end, -1);
        }
    };

    // Repairable-mode d clocks renew at every interior test; one draw per
    // segment between tests, starting from d_from with the element's d mode
    // healthy there. The u clock runs once from t when still alive.
    const auto simulate_alive = [&](bool d_failed_at_start) {
        element.clear();
        double d_from = t;
        if (d_failed_at_start) {
            const double repair = tests.empty() ? end : tests.front();
            element.push_back({t, repair});
            if (tests.empty()) {
                emit(element);
                return;
            }
            d_from = tests.front();
        }
        const double uf = t + exponential(rng, rate_u);
        if (uf <= end) element.push_back({uf, end});
        double seg = d_from;
        auto next = std::upper_bound(tests.begin(), tests.end(), seg);
        while (seg < end) {
            const double seg_end = next != tests.end() ? *next : end;
            const double df = seg + exponential(rng, rate_d);
            if (df <= seg_end) element.push_back({df, seg_end});
            seg = seg_end;
            if (next != tests.end()) ++next;
        }
        emit(element);
    };

    for (int e = 0; e < state.down_d; ++e) simulate_alive(/*d_failed_at_start=*/true);
    for (int e = 0; e < state.up_count; ++e) simulate_alive(/*d_failed_at_start=*/false);

    if (count0 >= threshold) return true;  // unreachable under the conditioning
    std::sort(events.begin(), events.end());
    int count = count0;
    for (const auto& [time, delta] : events) {
        count += delta;
        if (count >= threshold) return true;
    }
    return false;
}

PfhBatch run_pfh_batch(const BarrierSpec& spec, std::uint64_t samples, std::mt19937_64 rng) {
    const double t1 = spec.test_policy.full_test_period_hours;
    PfhBatch batch;
    std::vector<double> tests;
    std::vector<Interval> element;
    std::vector<std::pair<double, int>> events;
    for (std::uint64_t s = 0; s < samples; ++s) {
        const double t = uniform01(rng) * t1;
        const StartState state = sample_start_state(spec, t, rng);
        if (window_fails(spec, t, state, rng, tests, element, events)) ++batch.fails;
    }
    return batch;
}

}  // namespace

std::vector<Interval> simulate_element_history(double lambda, double coverage,
                                               const TestPolicy& policy, std::mt19937_64& rng) {
    policy.validate();
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::domain_error("simulate_element_history: lambda must be >= 0");
    if (!(coverage >= 0.0 && coverage <= 1.0))
        throw std::domain_error("simulate_element_history: coverage must lie in [0, 1]");

    const double t1 = policy.full_test_period_hours;
    const double rate_u = (1.0 - coverage) * lambda;  // cleared only by the full test
    const double rate_d = coverage * lambda;          // cleared at every partial test

    std::vector<Interval> down;
    if (rate_u > 0.0) {
        const double fail = exponential(rng, rate_u);
        if (fail < t1) down.push_back({fail, t1});
    }
    if (rate_d > 0.0) {
        const int n = policy.partial_test_count;
        const double t0 = policy.partial_period_hours();
        for (int p = 0; p < n; ++p) {
            const double seg_start = p * t0;
            const double seg_end = (p == n - 1) ? t1 : (p + 1) * t0;
            const double fail = seg_start + exponential(rng, rate_d);
            if (fail < seg_end) down.push_back({fail, seg_end});
        }
    }
    merge_intervals(down);
    return down;
}

PfdEstimate estimate_pfd(const BarrierSpec& spec, const SimulationConfig& config, Exec exec) {
    spec.validate();
    check_config(config);
    const double t1 = spec.test_policy.full_test_period_hours;
    const int grid = config.grid_points;
    const std::uint64_t n_batches = batch_count(config.trials);

    const auto parts = run_batches<PfdBatch>(n_batches, exec, [&](std::uint64_t k) {
        return run_pfd_batch(spec, grid, batch_trials(config.trials, k),
                             batch_rng(config.seed, k));
    });

    // Merge in batch-index order: identical results for any backend.
    std::vector<std::uint64_t> down_at(grid, 0);
    double frac_sum = 0.0;
    double frac_sq_sum = 0.0;
    for (const PfdBatch& part : parts) {
        for (int i = 0; i < grid; ++i) down_at[i] += part.down_at[i];
        frac_sum += part.frac_sum;
        frac_sq_sum += part.frac_sq_sum;
    }

    PfdEstimate result;
    result.grid_times.resize(grid);
    result.at_time.resize(grid);
    for (int i = 1; i <= grid; ++i) {
        result.grid_times[i - 1] = static_cast<double>(i) * t1 / grid;
        result.at_time[i - 1] = bernoulli_estimate(down_at[i - 1], config.trials);
    }
    const double n = static_cast<double>(config.trials);
    result.average.trials = config.trials;
    result.average.mean = frac_sum / n;
    if (config.trials > 1) {
        const double var =
            std::max((frac_sq_sum - frac_sum * frac_sum / n) / (n - 1.0), 0.0);
        result.average.std_error = std::sqrt(var / n);
    }
    return result;
}

Estimate estimate_pfh(const BarrierSpec& spec, const SimulationConfig& config, Exec exec) {
    spec.validate();
    check_config(config);
    const std::uint64_t n_batches = batch_count(config.trials);
    const auto parts = run_batches<PfhBatch>(n_batches, exec, [&](std::uint64_t k) {
        return run_pfh_batch(spec, batch_trials(config.trials, k), batch_rng(config.seed, k));
    });
    std::uint64_t fails = 0;
    for (const PfhBatch& part : parts) fails += part.fails;
    return bernoulli_estimate(fails, config.trials);
}

Estimate pool(const Estimate& a, const Estimate& b) {
    if (a.trials == 0) return b;
    if (b.trials == 0) return a;
    const double na = static_cast<double>(a.trials);
    const double nb = static_cast<double>(b.trials);
    const double n = na + nb;
    Estimate pooled;
    pooled.trials = a.trials + b.trials;
    pooled.mean = (a.mean * na + b.mean * nb) / n;
    // Second moments recovered from each run's standard error of the mean.
    const double second_a = a.std_error * a.std_error * na + a.mean * a.mean;
    const double second_b = b.std_error * b.std_error * nb + b.mean * b.mean;
    const double second = (second_a * na + second_b * nb) / n;
    pooled.std_error = std::sqrt(std::max(second - pooled.mean * pooled.mean, 0.0) / n);
    return pooled;
}

}  // namespace silverify::mc
