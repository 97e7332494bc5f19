// Acceptance gate: one pass/fail line per shipping criterion, nonzero exit
// if any criterion fails. Tolerances are pinned here, not configurable.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "silverify/approx.hpp"
#include "silverify/errors.hpp"
#include "silverify/exact.hpp"
#include "silverify/mc.hpp"
#include "silverify/model.hpp"
#include "silverify/quadrature.hpp"
#include "silverify/sil.hpp"

namespace {

using namespace silverify;
using nlohmann::json;
namespace fs = std::filesystem;

BarrierSpec make_spec(int m, int n, double lambda, double t1, int n_partial = 1,
                      double coverage = 0.0) {
    BarrierSpec spec;
    spec.architecture = {m, n};
    spec.failure_rate_per_hour = lambda;
    spec.test_policy = {t1, n_partial, coverage};
    return spec;
}

struct Check {
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void within_rel(double value, double reference, double tol, const std::string& what) {
        if (!(std::abs(value - reference) <= tol * std::abs(reference)))
            failures.push_back(what + ": got " + std::to_string(value) + ", want " +
                               std::to_string(reference) + " rel " + std::to_string(tol));
    }
    void within_abs(double value, double reference, double tol, const std::string& what) {
        if (!(std::abs(value - reference) <= tol))
            failures.push_back(what + ": got " + std::to_string(value) + ", want " +
                               std::to_string(reference) + " abs " + std::to_string(tol));
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

class Gate {
public:
    double analytic_seconds = 0.0;    // closed-form criteria
    double simulation_seconds = 0.0;  // Monte Carlo criteria

    enum class Bucket { analytic, simulation, none };

    void criterion(int id, const std::string& label, Bucket bucket,
                   const std::function<void(Check&)>& body) {
        Check ck;
        const auto start = std::chrono::steady_clock::now();
        try {
            body(ck);
        } catch (const std::exception& e) {
            ck.failures.push_back(std::string("unexpected exception: ") + e.what());
        }
        const double elapsed = seconds_since(start);
        if (bucket == Bucket::analytic) analytic_seconds += elapsed;
        if (bucket == Bucket::simulation) simulation_seconds += elapsed;
        if (ck.failures.empty()) {
            std::printf("[PASS] criterion %d: %s (%.2fs)\n", id, label.c_str(), elapsed);
        } else {
            ++failed_;
            std::printf("[FAIL] criterion %d: %s (%zu failure%s; first: %s)\n", id, label.c_str(),
                        ck.failures.size(), ck.failures.size() == 1 ? "" : "s",
                        ck.failures.front().c_str());
        }
        std::fflush(stdout);
    }

    int exit_code() const { return failed_ == 0 ? 0 : 1; }

private:
    int failed_ = 0;
};

// Average of the exact curve by direct quadrature of pfd_instant, cut at the
// partial-test instants. Each segment closes with its own left limit so the
// integrand stays continuous on the closed segment.
double quadrature_average(const BarrierSpec& spec) {
    const TestPolicy& policy = spec.test_policy;
    const double t1 = policy.full_test_period_hours;
    const double t0 = policy.partial_period_hours();
    std::vector<double> cuts{0.0};
    for (int p = 1; p < policy.partial_test_count; ++p) cuts.push_back(p * t0);
    cuts.push_back(t1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        QuadratureOptions options;
        options.abs_tol = 1e-13 * (b - a);
        total += integrate(
            [&](double t) { return t == b ? pfd_instant_left(spec, b) : pfd_instant(spec, t); }, a,
            b, options);
    }
    return total / t1;
}

struct SpecFamily {
    std::mt19937 gen{20260821};

    BarrierSpec draw(double log10_lt1_min, double log10_lt1_max) {
        const int n = std::uniform_int_distribution<int>(1, 4)(gen);
        const int m = std::uniform_int_distribution<int>(1, n)(gen);
        const double exponent =
            std::uniform_real_distribution<double>(log10_lt1_min, log10_lt1_max)(gen);
        const double t1 = 720.0;
        const double lambda = std::pow(10.0, exponent) / t1;
        const int n_partial = std::uniform_int_distribution<int>(1, 4)(gen);
        static constexpr double kCoverages[] = {0.0, 0.3, 0.7, 1.0};
        const double coverage = kCoverages[std::uniform_int_distribution<int>(0, 3)(gen)];
        return make_spec(m, n, lambda, t1, n_partial, coverage);
    }
};

std::string describe(const BarrierSpec& spec) {
    std::ostringstream oss;
    oss << spec.architecture.m_required << "oo" << spec.architecture.n_elements
        << " lambda=" << spec.failure_rate_per_hour << " n=" << spec.test_policy.partial_test_count
        << " E=" << spec.test_policy.partial_coverage;
    return oss.str();
}

struct CliResult {
    int code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "silverify_acceptance";
        fs::create_directories(d);
        return d;
    }();
    const fs::path capture = dir / "capture.txt";
    const std::string cmd =
        std::string(SILVERIFY_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult result;
    if (status != -1 && WIFEXITED(status)) result.code = WEXITSTATUS(status);
    std::ifstream in(capture, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    return result;
}

}  // namespace

int main() {
    Gate gate;

    // -----------------------------------------------------------------------
    gate.criterion(
        1, "voting-sum coefficients integer-exact against the reference table",
        Gate::Bucket::analytic, [](Check& ck) {
            struct Entry {
                int m, n;
                std::vector<std::int64_t> values;  // x = m..n
            };
            const std::vector<Entry> table = {
                {1, 1, {1}},          {1, 2, {2, -1}},   {1, 3, {3, -3, 1}},
                {1, 4, {4, -6, 4, -1}}, {2, 2, {1}},     {2, 3, {3, -2}},
                {2, 4, {6, -8, 3}},   {3, 3, {1}},       {3, 4, {4, -3}},
                {4, 4, {1}},
            };
            const auto start = std::chrono::steady_clock::now();
            for (const Entry& entry : table) {
                for (int x = entry.m; x <= entry.n; ++x) {
                    const std::int64_t got = coeff_S(entry.m, entry.n, x);
                    const std::int64_t want = entry.values[static_cast<std::size_t>(x - entry.m)];
                    ck.require(got == want, "S(" + std::to_string(entry.m) + "," +
                                                std::to_string(entry.n) + "," + std::to_string(x) +
                                                ") = " + std::to_string(got) + ", want " +
                                                std::to_string(want));
                }
            }
            const double elapsed = seconds_since(start);
            ck.require(elapsed < 1e-3,
                       "coefficient table took " + std::to_string(elapsed) + "s, budget 1ms");
        });

    // -----------------------------------------------------------------------
    gate.criterion(
        2, "2oo3 monthly-test reference point: closed forms and simulation",
        Gate::Bucket::simulation, [](Check& ck) {
            const BarrierSpec spec = make_spec(2, 3, 1e-5, 720.0);
            const double avg = pfd_average(spec);
            const double fin = pfd_instant_left(spec, 720.0);
            ck.within_rel(avg, 5.138e-5, 5e-3, "average unavailability");
            ck.within_rel(fin, 1.537e-4, 5e-3, "pre-test unavailability at T1");
            ck.within_rel(pfd_average_approx(spec).value, 5.184e-5, 1e-12,
                          "first-order average");
            ck.within_rel(pfd_instant_approx(spec, 720.0, /*left_limit=*/true).value, 1.5552e-4,
                          1e-12, "first-order value at T1");

            mc::SimulationConfig sim;
            sim.trials = 10000000;
            sim.seed = 101;
            sim.grid_points = 4;  // grid lands on 180, 360, 540, 720
            const mc::PfdEstimate est = mc::estimate_pfd(spec, sim);
            ck.require(est.average.std_error > 0.0, "average standard error must be positive");
            const double z_avg = std::abs(est.average.mean - avg) / est.average.std_error;
            ck.require(z_avg <= 3.0,
                       "simulated average off by z = " + std::to_string(z_avg));
            const double se_fin = std::sqrt(fin * (1.0 - fin) / static_cast<double>(sim.trials));
            const double z_fin = std::abs(est.at_time[3].mean - fin) / se_fin;
            ck.require(z_fin <= 3.0,
                       "simulated pre-test value off by z = " + std::to_string(z_fin));
        });

    // -----------------------------------------------------------------------
    gate.criterion(
        3, "partial-test schedule: attenuation, inflation, and limit cases",
        Gate::Bucket::analytic, [](Check& ck) {
            const BarrierSpec partial = make_spec(2, 3, 1e-5, 720.0, 3, 0.5);
            ck.within_rel(pfd_average(partial), 2.151e-5, 5e-3, "partial-test average");
            ck.require(coeff_V(2, 3, 3, 0.5) == 3.75, "inflation coefficient must be exactly 3.75");
            ck.within_rel(pfd_average_approx(partial).value, 2.16e-5, 1e-12,
                          "first-order partial-test average");

            const BarrierSpec no_coverage = make_spec(2, 3, 1e-5, 720.0, 3, 0.0);
            const BarrierSpec basic = make_spec(2, 3, 1e-5, 720.0);
            ck.within_abs(pfd_average(no_coverage), pfd_average(basic), 1e-14,
                          "zero coverage must reduce to the basic schedule");

            const BarrierSpec full_coverage = make_spec(2, 3, 1e-5, 720.0, 3, 1.0);
            const BarrierSpec quarter = make_spec(2, 3, 1e-5, 240.0);
            ck.within_rel(pfd_average(full_coverage), pfd_average(quarter), 1e-12,
                          "full coverage must reproduce the shorter basic schedule");
            ck.within_rel(pfd_average(full_coverage), 5.743e-6, 5e-3,
                          "full-coverage average reference value");
        });

    // -----------------------------------------------------------------------
    gate.criterion(
        4, "time average equals direct quadrature of the instantaneous curve",
        Gate::Bucket::analytic, [](Check& ck) {
            SpecFamily family;
            for (int i = 0; i < 20; ++i) {
                const BarrierSpec spec = family.draw(-4.0, -1.0);
                const double direct = quadrature_average(spec);
                const double closed = pfd_average(spec);
                ck.within_abs(closed, direct, 1e-10, "average mismatch for " + describe(spec));
            }
        });

    // -----------------------------------------------------------------------
    gate.criterion(
        5, "first-order forms are conservative and tight in the validity domain",
        Gate::Bucket::analytic, [](Check& ck) {
            SpecFamily family;
            for (int i = 0; i < 20; ++i) {
                const BarrierSpec spec = family.draw(-4.0, -2.0);
                const double t1 = spec.test_policy.full_test_period_hours;
                for (int j = 1; j <= 20; ++j) {
                    const double t = t1 * j / 20.0;
                    const double exact = pfd_instant(spec, t);
                    const double approx = pfd_instant_approx(spec, t).value;
                    ck.require(approx >= exact, "approximation below exact at t = " +
                                                    std::to_string(t) + " for " + describe(spec));
                    if (exact > 0.0)
                        ck.require((approx - exact) / exact <= 0.05,
                                   "pointwise error above 5% for " + describe(spec));
                }
                const double exact_avg = pfd_average(spec);
                const double approx_avg = pfd_average_approx(spec).value;
                ck.require(approx_avg >= exact_avg,
                           "approximate average below exact for " + describe(spec));
                ck.require((approx_avg - exact_avg) / exact_avg <= 0.05,
                           "average error above 5% for " + describe(spec));
            }
        });

    // -----------------------------------------------------------------------
    gate.criterion(
        6, "per-hour failure measure: identity, closed forms, bridges, monotonicity",
        Gate::Bucket::analytic, [](Check& ck) {
            for (const double lambda : {1e-5, 1e-2}) {
                const BarrierSpec single = make_spec(1, 1, lambda, 1000.0);
                ck.within_abs(pfh_average(single).value, -std::expm1(-lambda), 1e-12,
                              "single-element hourly failure probability");
            }

            const std::vector<BarrierSpec> basics = {
                make_spec(2, 3, 1e-5, 720.0),  make_spec(1, 2, 1e-5, 720.0),
                make_spec(1, 1, 1e-6, 8760.0), make_spec(2, 4, 2e-6, 4380.0),
                make_spec(3, 4, 1e-6, 2000.0),
            };
            for (const BarrierSpec& spec : basics) {
                const PfhFromPfdApprox bridges = pfh_from_pfd_approx(spec);
                const std::vector<double> forms = {
                    pfh_average(spec).value,
                    pfh_average_approx(spec).value,
                    bridges.from_final_pfd.value,
                    bridges.from_average_pfd.value,
                };
                const double lo = *std::min_element(forms.begin(), forms.end());
                const double hi = *std::max_element(forms.begin(), forms.end());
                ck.require(lo > 0.0, "hourly forms must be positive for " + describe(spec));
                ck.require(hi <= 1.1 * lo,
                           "hourly forms spread beyond 10% for " + describe(spec));
            }

            for (const auto& [m, n, lambda] :
                 std::vector<std::tuple<int, int, double>>{{2, 3, 1e-5}, {1, 2, 1e-5},
                                                           {3, 4, 1e-6}}) {
                double previous = 0.0;
                for (const double t1 : {360.0, 720.0, 1440.0}) {
                    const double value = pfh_average(make_spec(m, n, lambda, t1)).value;
                    ck.require(value >= previous * (1.0 - 1e-12),
                               "hourly average must grow with the test period for " +
                                   describe(make_spec(m, n, lambda, t1)));
                    previous = value;
                }
            }
        });

    // -----------------------------------------------------------------------
    gate.criterion(
        7, "element-level simulation matches the two-mode renewal law",
        Gate::Bucket::simulation, [](Check& ck) {
            const BarrierSpec spec = make_spec(1, 1, 1e-3, 1000.0, 4, 0.5);
            mc::SimulationConfig sim;
            sim.trials = 1000000;
            sim.seed = 7070;
            sim.grid_points = 20;
            const mc::PfdEstimate est = mc::estimate_pfd(spec, sim);
            for (int i = 0; i < 20; ++i) {
                const double t = est.grid_times[static_cast<std::size_t>(i)];
                const double expected =
                    -std::expm1(-spec.failure_rate_per_hour * spec.test_policy.effective_age(t));
                const double se =
                    std::sqrt(expected * (1.0 - expected) / static_cast<double>(sim.trials));
                const double z =
                    std::abs(est.at_time[static_cast<std::size_t>(i)].mean - expected) / se;
                ck.require(z <= 3.0, "grid point t = " + std::to_string(t) +
                                         " off by z = " + std::to_string(z));
            }
        });

    // -----------------------------------------------------------------------
    gate.criterion(
        8, "integrity bands: half-open decades, lower bound inclusive",
        Gate::Bucket::analytic, [](Check& ck) {
            const auto reference_pfd = [](double p) {
                if (p < 1e-5) return SilLevel::none_above;
                if (p < 1e-4) return SilLevel::sil4;
                if (p < 1e-3) return SilLevel::sil3;
                if (p < 1e-2) return SilLevel::sil2;
                if (p < 1e-1) return SilLevel::sil1;
                return SilLevel::none_below;
            };
            const auto reference_pfh = [](double p) {
                if (p < 1e-9) return SilLevel::none_above;
                if (p < 1e-8) return SilLevel::sil4;
                if (p < 1e-7) return SilLevel::sil3;
                if (p < 1e-6) return SilLevel::sil2;
                if (p < 1e-5) return SilLevel::sil1;
                return SilLevel::none_below;
            };
            for (int i = 0; i <= 500; ++i) {
                const double p = std::pow(10.0, -10.0 + i / 50.0);
                ck.require(sil_from_pfd(p).level == reference_pfd(p),
                           "demand-basis band wrong at p = " + std::to_string(p));
                ck.require(sil_from_pfh(p).level == reference_pfh(p),
                           "hourly-basis band wrong at p = " + std::to_string(p));
            }
            ck.require(sil_from_pfd(1e-4).level == SilLevel::sil3,
                       "1e-4 demand probability must read as SIL3");
            ck.require(sil_from_pfh(1e-8).level == SilLevel::sil3,
                       "1e-8 hourly probability must read as SIL3");
        });

    // -----------------------------------------------------------------------
    gate.criterion(
        9, "end-to-end command line run with runtime budgets", Gate::Bucket::none,
        [&gate](Check& ck) {
            const auto start = std::chrono::steady_clock::now();
            const std::string config = std::string(SILVERIFY_CONFIG_DIR) + "/figure1_basic.json";

            const CliResult eval = run_cli("evaluate --json --config " + config);
            ck.require(eval.code == 0, "evaluate exited with " + std::to_string(eval.code));
            if (eval.code == 0) {
                const json doc = json::parse(eval.output, nullptr, false);
                if (doc.is_discarded()) {
                    ck.require(false, "evaluate emitted unparsable JSON");
                } else {
                    ck.require(doc.at("sil").at("low_demand") == "SIL4",
                               "low-demand verdict must be SIL4");
                    ck.require(doc.at("sil").at("high_demand") == "SIL2",
                               "high-demand verdict must be SIL2");
                    ck.require(doc.at("demand").at("applicable_sil") == "SIL4",
                               "applicable verdict must be SIL4 at the configured demand rate");
                    const double pfh = doc.at("pfh_average").at("approximate").get<double>();
                    ck.within_rel(pfh, 2.16e-7, 1e-9, "first-order hourly failure measure");
                }
            }
            const double analytic_elapsed = seconds_since(start);

            const auto sim_start = std::chrono::steady_clock::now();
            const CliResult validate = run_cli("validate --config " + config);
            ck.require(validate.code == 0, "validate exited with " + std::to_string(validate.code) +
                                               "\n" + validate.output);
            ck.require(validate.output.find("result: PASS") != std::string::npos,
                       "validate must report PASS");
            const double sim_elapsed = seconds_since(sim_start);

            const double analytic_total = gate.analytic_seconds + analytic_elapsed;
            const double sim_total = gate.simulation_seconds + sim_elapsed;
            ck.require(analytic_total < 5.0, "analytic criteria took " +
                                                 std::to_string(analytic_total) + "s, budget 5s");
            ck.require(sim_total < 600.0,
                       "simulation criteria took " + std::to_string(sim_total) + "s, budget 600s");
        });

    return gate.exit_code();
}
