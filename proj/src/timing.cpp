#include "dlmem/timing.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <tuple>

namespace dlmem {

std::string_view to_string(Limiter limiter) {
    switch (limiter) {
    case Limiter::Setup: return "SETUP";
    case Limiter::Hold: return "HOLD";
    case Limiter::Electrical: return "ELECTRICAL";
    case Limiter::Functional: return "FUNCTIONAL";
    case Limiter::None: return "NONE";
    }
    return "?";
}

Femtoseconds StaReport::worst_slack() const { return slacks.empty() ? Femtoseconds::max() : worst().slack; }

const SlackEntry& StaReport::worst() const {
    if (slacks.empty()) throw std::logic_error("empty slack report");
    return *std::min_element(slacks.begin(), slacks.end(),
                             [](const SlackEntry& a, const SlackEntry& b) { return a.slack < b.slack; });
}

bool StaReport::clean(Femtoseconds guard) const {
    return std::all_of(slacks.begin(), slacks.end(), [&](const SlackEntry& s) { return s.slack >= guard; });
}

MemoryConfig at_frequency(const MemoryConfig& cfg, double frequency_hz) {
    MemoryConfig out = cfg;
    if (frequency_hz != cfg.base.frequency_hz) {
        out.base.frequency_hz = frequency_hz;
        out.loop_delay.reset();
    }
    return out;
}

namespace {

struct Span {
    Femtoseconds min{0};
    Femtoseconds max{0};

    Span operator+(const Span& o) const { return {min + o.min, max + o.max}; }
    Span operator+(Femtoseconds d) const { return {min + d, max + d}; }
};

Span span_of(const BiasDelayModel& m, double r_lo, double r_hi) {
    return {m.at(BiasPoint{r_hi}), m.at(BiasPoint{r_lo})};
}

} // namespace

StaReport sta(const MemoryConfig& cfg0, double frequency_hz, double r_lo, double r_hi) {
    if (!(r_lo <= r_hi) || !(r_lo > 0.0)) throw std::invalid_argument("bias range must satisfy 0 < r_lo <= r_hi");
    const MemoryConfig cfg = at_frequency(cfg0, frequency_hz);
    const auto& base = cfg.base;
    for (const auto& [name, p] : base.cells)
        if (!p.in_range(BiasPoint{r_lo}) || !p.in_range(BiasPoint{r_hi}))
            throw ElectricalRangeError("bias range leaves the operating range of cell " + name);
    const auto plan = plan_timing(cfg);

    const auto& wd = base.cell(kWriteDro);
    const auto& rc = base.cell(kRecirc);
    const auto& mg = base.cell(kMerger);
    const auto& fo = base.cell(kFanout);
    const auto& rd = base.cell(kRead);
    const Span dro = span_of(wd.delay, r_lo, r_hi);
    const Span rec0 = span_of(rc.delay, r_lo, r_hi);
    const Span rec1 = span_of(rc.delay_alt, r_lo, r_hi);
    const Span merge = span_of(mg.delay, r_lo, r_hi);
    const Span fan = span_of(fo.delay, r_lo, r_hi);
    const Span read0 = span_of(rd.delay, r_lo, r_hi);
    const Span read1 = span_of(rd.delay_alt, r_lo, r_hi);
    Span jitter{};
    for (auto j : base.loop_jitter) {
        jitter.min = std::min(jitter.min, j);
        jitter.max = std::max(jitter.max, j);
    }

    const auto I = plan.interval;
    const auto T = plan.trip;
    const auto H = plan.header;
    const auto L = plan.loop_delay;
    const auto wo = plan.write_offset;
    const auto ro = plan.read_offset;
    const int N = plan.num_addresses;
    const auto gap = N >= 2 ? I : T;

    const Span p_rec = rec0 + merge + fan;
    const Span p_w = dro + merge + fan;
    const Span merged{std::min(dro.min, rec0.min) + merge.min, std::max(dro.max, rec0.max) + merge.max};
    const Span data_in = merged + fan;

    StaReport r;
    r.frequency_hz = frequency_hz;
    r.r_lo = r_lo;
    r.r_hi = r_hi;
    auto fixed = [](Femtoseconds t) { return ArrivalWindow{t, t}; };
    auto window = [](Span s, Femtoseconds base_time) { return ArrivalWindow{base_time + s.min, base_time + s.max}; };
    r.windows[lines::kWriteData] = fixed(plan.data_offset - H);
    r.windows[lines::kWriteAddress] = fixed(wo);
    r.windows[lines::kNotWriteAddress] = fixed(wo);
    r.windows[lines::kReadAddress] = fixed(ro);
    r.windows[lines::kNotReadAddress] = fixed(ro);
    r.windows[lines::kWriteDroOut] = window(dro, wo);
    r.windows[lines::kRecircOut] = window(rec0, wo);
    r.windows[lines::kRecircDiscard] = window(rec1, wo);
    r.windows[lines::kMergerOut] = window(merged, wo);
    r.windows[lines::kLoopDataIn] = window(data_in, wo);
    r.windows[lines::kReadClock] = window(data_in, wo);
    r.windows[lines::kLoopDataOut] = window(data_in + jitter, wo + L - T);
    r.windows[lines::kReadData] = window(data_in + read0, wo);
    r.windows[lines::kReadDiscard] = window(read1, ro);

    auto add = [&](std::string constraint, const char* cell, ViolationKind kind, Femtoseconds slack) {
        r.slacks.push_back({std::move(constraint), cell, kind, slack});
    };
    using VK = ViolationKind;
    add("recirculated bit setup at recirc", kRecirc, VK::Setup, T - p_rec.max - L - jitter.max - rc.setup);
    add("written bit setup at recirc", kRecirc, VK::Setup, T - p_w.max - L - jitter.max - rc.setup);
    add("recirculated bit hold at recirc", kRecirc, VK::Hold, p_rec.min + L + jitter.min - T + gap - rc.hold);
    add("written bit hold at recirc", kRecirc, VK::Hold, p_w.min + L + jitter.min - T + gap - rc.hold);
    add("recirc clock-to-clock cycle", kRecirc, VK::Setup, I - (rc.setup + rec0.max));
    add("read clock setup", kRead, VK::Setup, wo + std::min(p_rec.min, p_w.min) - ro - rd.setup);
    add("read clock hold", kRead, VK::Hold, ro + gap - wo - std::max(p_rec.max, p_w.max) - rd.hold);
    add("read address setup", kRead, VK::Setup, gap - rd.setup);
    add("read address hold", kRead, VK::Hold, gap - rd.hold);
    add("read clock-to-clock cycle", kRead, VK::Setup, I - (rd.setup + read0.max));
    add("write data setup", kWriteDro, VK::Setup, H + wo - plan.data_offset - wd.setup);
    add("write data hold", kWriteDro, VK::Hold, T + plan.data_offset - (H + I * (N - 1) + wo) - wd.hold);
    add("merger input separation", kMerger, VK::Electrical,
        gap + std::min(rec0.min - dro.max, dro.min - rec0.max) - mg.min_separation);
    return r;
}

double max_frequency(const MemoryConfig& cfg, const MaxFrequencyOptions& options) {
    const auto steps = static_cast<long>(std::floor(options.ceiling_hz / options.step_hz + 1e-9));
    for (long n = steps; n >= 1; --n) {
        const double f = static_cast<double>(n) * options.step_hz;
        try {
            if (sta(cfg, f, 1.0, 1.0).worst_slack().count() >= 0) return f;
        } catch (const InfeasibleError&) {
        } catch (const ConfigError&) {
        }
    }
    return 0.0;
}

ProbePoints probe_points(const std::string& cell) {
    using namespace lines;
    if (cell == kWriteDro) return {kWriteAddress, kWriteDroOut};
    if (cell == kRecirc) return {kNotWriteAddress, kRecircOut};
    if (cell == kMerger) return {kWriteDroOut, kMergerOut};
    if (cell == kFanout) return {kMergerOut, kLoopDataIn};
    if (cell == kRead) return {kReadClock, kReadData};
    throw ConfigError("cell", "no characterization probe for '" + cell + "'");
}

std::vector<DelaySample> characterize_cell(const MemoryConfig& cfg, const std::string& cell,
                                           const std::vector<double>& biases) {
    const auto probe = probe_points(cell);
    const auto& params = cfg.base.cell(cell);
    // Write a 1 into address 0 and read it back twice, so every cell fires.
    MemoryProgram harness;
    harness.trips.push_back({WriteOp{0, 1}, {0}});
    harness.trips.push_back({std::nullopt, {0}});
    std::vector<DelaySample> out;
    for (double b : biases) {
        const BiasPoint bias{b};
        if (!params.in_range(bias))
            throw ElectricalRangeError("bias " + std::to_string(b) + " outside the operating range of " + cell);
        const auto result = run_program(harness, cfg, bias);
        std::optional<TimeStamp> output;
        for (const auto& e : result.trace.events)
            if (e.line == probe.output) {
                output = e.time;
                break;
            }
        if (!output) throw EngineError("no pulse on " + probe.output + " while characterizing " + cell);
        std::optional<TimeStamp> trigger;
        for (const auto& e : result.trace.events)
            if (e.line == probe.trigger && e.time < *output) trigger = e.time;
        if (!trigger) throw EngineError("no trigger on " + probe.trigger + " while characterizing " + cell);
        out.push_back({b, *output - *trigger});
    }
    return out;
}

std::vector<Scenario> default_scenarios(int num_addresses) {
    const int a = num_addresses >= 2 ? 1 : 0;
    std::vector<Scenario> out;

    Scenario write_read{"write-read", {}};
    write_read.program.trips = {{WriteOp{a, 1}, {a}}, {std::nullopt, {a}}, {std::nullopt, {a}}};
    out.push_back(write_read);

    Scenario overwrite{"overwrite", {}};
    overwrite.program.trips = {{WriteOp{a, 1}, {a}}, {WriteOp{a, 0}, {a}}, {std::nullopt, {a}}, {std::nullopt, {a}}};
    out.push_back(overwrite);

    Scenario sweep{"address-sweep", {}};
    std::vector<int> all;
    for (int k = 0; k < num_addresses; ++k) all.push_back(k);
    for (int k = 0; k < num_addresses; ++k) sweep.program.trips.push_back({WriteOp{k, 1}, {}});
    sweep.program.trips.push_back({std::nullopt, all});
    for (int k = 0; k < num_addresses; ++k) sweep.program.trips.push_back({WriteOp{k, k % 2}, {k}});
    sweep.program.trips.push_back({std::nullopt, all});
    out.push_back(sweep);
    return out;
}

namespace {

struct PointOutcome {
    bool pass = true;
    std::optional<TimingViolation> first;
};

PointOutcome evaluate(const MemoryConfig& cfg, const std::vector<Scenario>& suite, double bias) {
    PointOutcome o;
    for (const auto& sc : suite) {
        const auto r = run_program(sc.program, cfg, BiasPoint{bias});
        if (!r.pass || r.reads != oracle(sc.program, cfg.base.num_addresses)) o.pass = false;
        for (const auto& v : r.trace.violations) {
            auto key = [](const TimingViolation& x) { return std::tie(x.time, x.kind, x.cell, x.detail); };
            if (!o.first || key(v) < key(*o.first)) o.first = v;
        }
    }
    return o;
}

Limiter classify(const PointOutcome& o) {
    if (!o.first) return Limiter::Functional;
    switch (o.first->kind) {
    case ViolationKind::Setup: return Limiter::Setup;
    case ViolationKind::Hold: return Limiter::Hold;
    case ViolationKind::Electrical: return Limiter::Electrical;
    }
    return Limiter::Functional;
}

} // namespace

MarginReport bias_margin(const MemoryConfig& cfg0, double frequency_hz, const std::vector<Scenario>& suite,
                         const MarginOptions& options) {
    if (suite.empty()) throw std::invalid_argument("bias margin needs at least one scenario");
    const MemoryConfig cfg = at_frequency(cfg0, frequency_hz);
    MarginReport rep;
    rep.frequency_hz = frequency_hz;
    const auto nominal = evaluate(cfg, suite, 1.0);
    if (!nominal.pass) {
        rep.lower_limiter = rep.upper_limiter = classify(nominal);
        rep.note = "nominal bias fails";
        return rep;
    }
    for (int dir : {-1, +1}) {
        int& pct = dir < 0 ? rep.lower_pct : rep.upper_pct;
        Limiter& lim = dir < 0 ? rep.lower_limiter : rep.upper_limiter;
        lim = Limiter::None;
        for (int i = 1; i <= options.max_pct; ++i) {
            const auto o = evaluate(cfg, suite, static_cast<double>(100 + dir * i) / 100.0);
            if (!o.pass) {
                lim = classify(o);
                break;
            }
            pct = i;
        }
    }
    return rep;
}

MarginReport bias_margin(const MemoryConfig& cfg, double frequency_hz) {
    return bias_margin(cfg, frequency_hz, default_scenarios(cfg.base.num_addresses));
}

std::vector<MarginReport> margin_sweep(const MemoryConfig& cfg, const std::vector<double>& frequencies,
                                       const std::vector<Scenario>& suite, const MarginOptions& options) {
    if (frequencies.empty()) throw std::invalid_argument("margin sweep needs at least one frequency");
    const auto scenarios = suite.empty() ? default_scenarios(cfg.base.num_addresses) : suite;
    std::vector<double> sorted = frequencies;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    auto one = [&](double f) {
        MarginReport infeasible;
        infeasible.frequency_hz = f;
        infeasible.feasible = false;
        try {
            const auto report = sta(cfg, f, 1.0, 1.0);
            if (report.worst_slack().count() < 0) {
                infeasible.note = "negative slack at nominal bias: " + report.worst().constraint;
                return infeasible;
            }
            return bias_margin(cfg, f, scenarios, options);
        } catch (const InfeasibleError& e) {
            infeasible.note = e.what();
            return infeasible;
        }
    };
    std::vector<std::future<MarginReport>> jobs;
    for (double f : sorted) jobs.push_back(std::async(std::launch::async, one, f));
    std::vector<MarginReport> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

void write_margin_csv(const std::vector<MarginReport>& reports, std::ostream& out) {
    out << "frequency_Hz,lower_pct,upper_pct,limiter\n";
    for (const auto& r : reports) {
        out << std::llround(r.frequency_hz) << ',';
        if (!r.feasible) {
            out << ",,INFEASIBLE\n";
            continue;
        }
        out << r.lower_pct << ',' << r.upper_pct << ',' << to_string(r.lower_limiter) << '/'
            << to_string(r.upper_limiter) << '\n';
    }
}

void write_characterization_csv(const std::vector<DelaySample>& samples, std::ostream& out) {
    out << "bias_ratio,delay_fs\n";
    for (const auto& s : samples) out << s.bias << ',' << s.delay.count() << '\n';
}

void write_sta_report(const StaReport& report, std::ostream& out) {
    out << "frequency_Hz " << std::llround(report.frequency_hz) << "  bias [" << report.r_lo << ", " << report.r_hi
        << "]\n\narrival windows (from interval start)\n";
    for (const auto& [line, w] : report.windows)
        out << "  " << line << std::string(line.size() < 20 ? 20 - line.size() : 1, ' ') << '[' << format_ps(w.earliest)
            << ", " << format_ps(w.latest) << "]\n";
    out << "\nslacks\n";
    for (const auto& s : report.slacks)
        out << "  " << (s.slack.count() < 0 ? "VIOLATED " : "ok       ") << to_string(s.kind) << "  "
            << s.constraint << ": " << format_ps(s.slack) << '\n';
    if (!report.slacks.empty()) out << "\nworst slack " << format_ps(report.worst_slack()) << '\n';
}

} // namespace dlmem
