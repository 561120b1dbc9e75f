// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dlmem/density.hpp"
#include "dlmem/memory.hpp"
#include "dlmem/timing.hpp"
#include "dlmem/trace_io.hpp"
#include "support.hpp"

using namespace dlmem;

namespace {

// Tolerances and budgets.
constexpr double kDensityRelTol = 0.05;
constexpr double kVelocityFactorTol = 0.001;
constexpr double kDensityBudgetS = 1.0;
constexpr double kSpacingTargetUm = 21.0;
constexpr double kSpacingTolUm = 0.3;
constexpr double kScenarioBudgetS = 0.1;
constexpr int kOraclePrograms = 1000;
constexpr double kOracleBudgetS = 30.0;
constexpr double kMaxFreqTargetHz = 100e9;
constexpr double kMaxFreqTolHz = 1e9;
constexpr int kMarginAt100 = 13;
constexpr int kMinMarginAt20 = 20;
constexpr double kMarginBudgetS = 120.0;
constexpr int kRetimingCases = 200; // per side of the window
constexpr double kRetimingBudgetS = 10.0;

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Verdict()>& check, double budget_s = 0.0) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0.0 && s >= budget_s) {
        v.pass = false;
        v.detail += (v.detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    if (!v.pass) ++failures;
    std::printf("%s  %d. %-22s %8.3fs  %s\n", v.pass ? "PASS" : "FAIL", id, name, s, v.detail.c_str());
    std::fflush(stdout);
}

MemoryConfig fixture_config(const char* name) { return parse_memory_config(read_text_file(test::fixture(name))); }
MemoryProgram fixture_program(const char* name) { return parse_program(read_text_file(test::fixture(name))); }

std::size_t count_in(const Trace& t, const std::string& line, TimeStamp lo, TimeStamp hi) {
    return query_pulses(t, line, lo, hi).count;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

Verdict density_table() {
    const auto rows = reproduce_table(line_presets());
    int checked = 0, bad = 0;
    std::string worst;
    double worst_err = 0.0;
    for (const auto& r : rows) {
        if (!r.relative_error()) continue;
        ++checked;
        const double e = *r.relative_error();
        if (std::abs(e) > kDensityRelTol) ++bad;
        if (std::abs(e) > std::abs(worst_err)) {
            worst_err = e;
            worst = r.spec.name + "@" + fmt("%g", r.frequency_hz / 1e9) + "GHz";
        }
    }
    int vf_bad = 0;
    for (const auto& p : line_presets()) {
        const double f = velocity(p.inductance_h_per_m, p.capacitance_f_per_m).factor;
        if (std::abs(f - *published_velocity_factor(p.name)) > kVelocityFactorTol) ++vf_bad;
    }
    Verdict v;
    v.pass = checked == 36 && bad == 0 && vf_bad == 0;
    v.detail = std::to_string(checked - bad) + "/" + std::to_string(checked) + " densities within 5%, " +
               std::to_string(8 - vf_bad) + "/8 velocity factors within 0.001; worst " + worst + " " +
               fmt("%+.1f%%", worst_err * 100);
    return v;
}

Verdict spacing() {
    const double um = pulse_spacing(0.007 * kSpeedOfLight, 100e9) * 1e6;
    return {std::abs(um - kSpacingTargetUm) <= kSpacingTolUm, fmt("%.2f um", um)};
}

Verdict write_read_scenario() {
    const auto cfg = fixture_config("default.json");
    const auto plan = plan_timing(cfg);
    const auto r = run_program(fixture_program("write_read_program.json"), cfg);
    const auto& t = r.trace;
    std::vector<std::string> failed;
    auto need = [&](bool ok, const char* what) {
        if (!ok) failed.push_back(what);
    };
    need(count_in(t, lines::kWriteData, plan.trip_start(0), plan.trip_start(1)) == 1 &&
             count_in(t, lines::kWriteData, plan.trip_start(0), plan.header) == 1,
         "write_data in header");
    const auto i1 = plan.interval_start(0, 1);
    need(count_in(t, lines::kWriteAddress, plan.trip_start(0), plan.trip_start(1)) == 1 &&
             count_in(t, lines::kWriteAddress, i1, i1 + plan.interval) == 1,
         "write_address in interval 1");
    need(count_in(t, lines::kReadAddress, i1, i1 + plan.interval) == 1, "read_address in interval 1");
    const auto wa = query_pulses(t, lines::kWriteAddress, plan.trip_start(0), plan.trip_start(1));
    need(!wa.times.empty() && count_in(t, lines::kLoopDataIn, wa.times.front(), plan.trip_start(3)) >= 1,
         "loop_data_in after write_address");
    // A read's data can land past the trip boundary; it belongs to the read
    // whose interval plus read delay covers it.
    const auto read_delay = cfg.base.cells.at(kRead).delay.nominal();
    for (int trip = 0; trip < 3; ++trip) {
        const auto ra = query_pulses(t, lines::kReadAddress, plan.trip_start(trip), plan.trip_start(trip + 1));
        need(ra.count == 1 &&
                 count_in(t, lines::kReadData, ra.times.front(), ra.times.front() + plan.interval + read_delay) >= 1,
             "read_data after read_address");
    }
    need(t.violations.empty(), "zero violations");
    Verdict v{failed.empty(), failed.empty() ? "all predicates hold" : ""};
    for (const auto& f : failed) v.detail += (v.detail.empty() ? "failed: " : ", ") + f;
    return v;
}

Verdict overwrite_scenario() {
    const auto cfg = fixture_config("default.json");
    const auto plan = plan_timing(cfg);
    const auto program = fixture_program("overwrite_program.json");
    const auto r = run_program(program, cfg);
    const auto end = plan.trip_start(static_cast<int>(program.trips.size()) + 1);
    const auto in = count_in(r.trace, lines::kLoopDataIn, plan.trip_start(2), end);
    const auto out = count_in(r.trace, lines::kLoopDataOut, plan.trip_start(2), end);
    return {in == 0 && out == 0, "loop_data_in " + std::to_string(in) + ", loop_data_out " + std::to_string(out) +
                                     " pulses from trip 2"};
}

Verdict oracle_equivalence() {
    test::Gen g(2024);
    int match = 0;
    for (int i = 0; i < kOraclePrograms; ++i) {
        const int n = g.integer(2, 8);
        MemoryConfig cfg;
        cfg.base.frequency_hz = std::vector<double>{20e9, 50e9, 75e9, 100e9}[static_cast<std::size_t>(g.integer(0, 3))];
        cfg.base.num_addresses = n;
        const auto program = g.program(n, 10);
        const auto r = run_program(program, cfg);
        if (r.pass && r.reads == oracle(program, n)) ++match;
    }
    return {match == kOraclePrograms, std::to_string(match) + "/" + std::to_string(kOraclePrograms) + " programs"};
}

Verdict max_freq() {
    const double f = max_frequency(fixture_config("default.json"));
    return {std::abs(f - kMaxFreqTargetHz) <= kMaxFreqTolHz, fmt("%.0f GHz", f / 1e9)};
}

Verdict margins() {
    const auto reports = margin_sweep(fixture_config("calibrated.json"), {20e9, 50e9, 75e9, 100e9});
    const auto& r20 = reports.front();
    const auto& r100 = reports.back();
    std::vector<std::string> failed;
    if (r100.lower_pct != kMarginAt100 || r100.upper_pct != kMarginAt100) failed.push_back("100 GHz margin");
    if (r20.lower_pct < kMinMarginAt20 || r20.upper_pct < kMinMarginAt20) failed.push_back("20 GHz margin");
    if (r20.lower_limiter != Limiter::Electrical || r20.upper_limiter != Limiter::Electrical)
        failed.push_back("20 GHz limiter");
    auto timing = [](Limiter l) { return l == Limiter::Setup || l == Limiter::Hold; };
    if (!timing(r100.lower_limiter) || !timing(r100.upper_limiter)) failed.push_back("100 GHz limiter");
    for (std::size_t i = 1; i < reports.size(); ++i)
        if (!reports[i].feasible || reports[i].width() > reports[i - 1].width()) failed.push_back("monotone widths");
    std::string detail;
    for (const auto& r : reports)
        detail += (detail.empty() ? "" : ", ") + fmt("%g", r.frequency_hz / 1e9) + "GHz -" +
                  std::to_string(r.lower_pct) + "/+" + std::to_string(r.upper_pct) + "% " +
                  std::string(to_string(r.lower_limiter)) + "/" + std::string(to_string(r.upper_limiter));
    for (const auto& f : failed) detail += "; failed: " + f;
    return {failed.empty(), detail};
}

Verdict retiming() {
    test::Gen g(7);
    int absorbed = 0, flagged = 0;
    for (int i = 0; i < kRetimingCases; ++i) {
        auto trial = test::retiming_trial(g);
        const auto baseline = run_program(trial.program, trial.cfg);
        const auto w = retiming_window(trial.cfg);
        trial.cfg.base.loop_jitter = test::jitter_for(
            trial.program, [&] { return Femtoseconds{g.integer64(w.lo.count(), w.hi.count())}; });
        const auto r = run_program(trial.program, trial.cfg);
        auto loop_in = [](const Trace& t) { return query_pulses(t, lines::kLoopDataIn, TimeStamp{0}, TimeStamp::max()).times; };
        if (baseline.pass && r.pass && r.reads == oracle(trial.program, trial.cfg.base.num_addresses) &&
            loop_in(r.trace) == loop_in(baseline.trace))
            ++absorbed;
    }
    for (int i = 0; i < kRetimingCases; ++i) {
        auto trial = test::retiming_trial(g);
        const auto w = retiming_window(trial.cfg);
        const auto& rc = trial.cfg.base.cells.at(kRecirc);
        const auto band = (rc.setup + rc.hold).count();
        const auto off = Femtoseconds{g.integer64(1, band - 1)};
        const auto j = g.coin() ? w.hi + off : w.lo - off;
        trial.cfg.base.loop_jitter = test::jitter_for(trial.program, [&] { return j; });
        const auto r = run_program(trial.program, trial.cfg);
        bool timing = false;
        for (const auto& v : r.trace.violations)
            timing = timing || v.kind == ViolationKind::Setup || v.kind == ViolationKind::Hold;
        if (timing && !r.pass) ++flagged;
    }
    return {absorbed == kRetimingCases && flagged == kRetimingCases,
            std::to_string(absorbed) + "/" + std::to_string(kRetimingCases) + " in-window absorbed, " +
                std::to_string(flagged) + "/" + std::to_string(kRetimingCases) + " beyond-window flagged"};
}

std::string artifacts() {
    std::ostringstream s;
    const auto cfg = fixture_config("default.json");
    for (const char* p : {"write_read_program.json", "overwrite_program.json"}) {
        const auto r = run_program(fixture_program(p), cfg);
        write_trace_csv(r.trace, s);
        write_trace_vcd(r.trace, s);
        s << result_to_json(r).dump();
    }
    write_sta_report(sta(cfg, 100e9, 0.87, 1.13), s);
    write_margin_csv(margin_sweep(fixture_config("calibrated.json"), {20e9, 50e9, 75e9, 100e9}), s);
    write_density_csv(reproduce_table(line_presets()), s);
    return s.str();
}

Verdict determinism() {
    const auto a = artifacts();
    const auto b = artifacts();
    return {a == b && !a.empty(), std::to_string(a.size()) + " bytes compared"};
}

} // namespace

int main() {
    report(1, "density table", density_table, kDensityBudgetS);
    report(2, "pulse spacing", spacing);
    report(3, "write-read scenario", write_read_scenario, kScenarioBudgetS);
    report(4, "overwrite scenario", overwrite_scenario, kScenarioBudgetS);
    report(5, "oracle equivalence", oracle_equivalence, kOracleBudgetS);
    report(6, "max frequency", max_freq);
    report(7, "bias margins", margins, kMarginBudgetS);
    report(8, "retiming window", retiming, kRetimingBudgetS);
    report(9, "determinism", determinism);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
