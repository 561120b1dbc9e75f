#include <doctest.h>

#include <algorithm>
#include <set>

#include "dlmem/memory.hpp"
#include "support.hpp"

using namespace dlmem;
using namespace dlmem::literals;

namespace {

MemoryConfig config_at(double f_hz, int n) {
    MemoryConfig cfg;
    cfg.base.frequency_hz = f_hz;
    cfg.base.num_addresses = n;
    return cfg;
}

MemoryProgram write_read() {
    MemoryProgram p;
    p.trips = {{WriteOp{1, 1}, {1}}, {std::nullopt, {1}}, {std::nullopt, {1}}};
    return p;
}

MemoryProgram overwrite() {
    MemoryProgram p;
    p.trips = {{WriteOp{1, 1}, {1}}, {WriteOp{1, 0}, {}}, {std::nullopt, {1}}, {std::nullopt, {1}}};
    return p;
}

std::vector<TimeStamp> pulses(const Trace& t, const std::string& line) {
    std::vector<TimeStamp> out;
    for (const auto& e : t.events)
        if (e.line == line) out.push_back(e.time);
    return out;
}

// Loop delay by hand: trip minus the recirculation path minus the point
// midway through the recirculation DRO2R's setup/hold window.
std::int64_t reference_loop_delay(std::int64_t interval, int n, std::int64_t path, std::int64_t setup,
                                  std::int64_t hold) {
    const std::int64_t trip = interval * (n + 1);
    const std::int64_t gap = n >= 2 ? interval : trip;
    return trip - path - (gap - hold + setup) / 2;
}

} // namespace

TEST_CASE("controller netlist shape") {
    const auto net = build_controller(config_at(100e9, 3));
    CHECK(net.logic_cell_count() == 5);
    const auto& conns = net.connections();
    CHECK(std::count_if(conns.begin(), conns.end(), [](const Connection& c) { return c.delay_line; }) == 1);
    for (const char* l : {"write_data", "write_address", "not_write_address", "read_address", "not_read_address",
                          "loop_data_in", "loop_data_out", "read_data"})
        CHECK(net.observed().count(l) == 1);
    CHECK_NOTHROW(net.validate());
}

TEST_CASE("loop delay zero is rejected") {
    auto cfg = config_at(100e9, 3);
    cfg.loop_delay = 0_fs;
    CHECK_THROWS_AS(build_controller(cfg), ConfigError);
    CHECK_THROWS_AS(parse_memory_config(R"({"frequency": "100GHz", "num_addresses": 3,
                                            "memory": {"loop_delay": "0ps"}})"),
                    ConfigError);
}

TEST_CASE("memory document parsing and round trip") {
    const auto cfg = parse_memory_config(R"({"frequency": "20GHz", "num_addresses": 4,
        "memory": {"phase_read": 0.25, "phase_write": 0.6, "phase_data": 0.4, "loop_delay": "150ps"}})");
    CHECK(cfg.phase_read == 0.25);
    CHECK(cfg.phase_write == 0.6);
    CHECK(cfg.phase_data == 0.4);
    CHECK(cfg.loop_delay == 150_ps);
    CHECK(parse_memory_config(serialize_memory_config(cfg)) == cfg);
    auto field_of = [](const std::string& text) {
        try {
            parse_memory_config(text);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    CHECK(field_of(R"({"frequency": "20GHz", "num_addresses": 4, "memory": {"phase_write": 1.0}})") ==
          "memory.phase_write");
    CHECK(field_of(R"({"frequency": "20GHz", "num_addresses": 4, "memory": {"phase": 0.1}})") == "memory.phase");
}

TEST_CASE("required loop delay") {
    // 100 GHz, N=3: 40 ps trip, 10 ps recirculation path (6 + 3 + 1), setup 4 ps, hold 1 ps.
    CHECK(required_loop_delay(config_at(100e9, 3)).count() == reference_loop_delay(10'000, 3, 10'000, 4'000, 1'000));
    CHECK(required_loop_delay(config_at(100e9, 3)) == 23'500_fs);
    CHECK(required_loop_delay(config_at(20e9, 3)).count() == reference_loop_delay(50'000, 3, 10'000, 4'000, 1'000));
    CHECK(required_loop_delay(config_at(20e9, 3)) == 163'500_fs);

    auto slow = config_at(100e9, 3);
    slow.base.cells.at(kRecirc).delay = BiasDelayModel::default_for(46_ps); // 50 ps path
    CHECK_THROWS_AS(required_loop_delay(slow), InfeasibleError);
}

TEST_CASE("property: required loop delay matches the hand formula") {
    test::Gen g(41);
    for (int i = 0; i < 300; ++i) {
        auto cfg = config_at(g.integer(10, 120) * 1e9, g.integer(1, 12));
        auto& rc = cfg.base.cells.at(kRecirc);
        rc.setup = Femtoseconds{g.integer(0, 5000)};
        rc.hold = Femtoseconds{g.integer(0, 3000)};
        const auto I = interval_duration(cfg.base).count();
        const auto ref = reference_loop_delay(I, cfg.base.num_addresses, 10'000, rc.setup.count(), rc.hold.count());
        if (ref <= 0 || 10'000 >= I * (cfg.base.num_addresses + 1)) {
            CHECK_THROWS_AS(required_loop_delay(cfg), InfeasibleError);
        } else {
            CHECK(required_loop_delay(cfg).count() == ref);
        }
    }
}

TEST_CASE("stimulus for the write-and-read trip") {
    const auto cfg = config_at(100e9, 3);
    const auto plan = plan_timing(cfg);
    const auto stim = stimulus_for(write_read(), cfg);
    auto in_trip0 = [&](const std::string& line) {
        std::vector<int> slots;
        for (const auto& e : stim) {
            if (e.line != line || e.time >= plan.trip) continue;
            slots.push_back(e.time < plan.header ? -1 : static_cast<int>((e.time - plan.header) / plan.interval));
        }
        return slots;
    };
    CHECK(in_trip0("write_data") == std::vector<int>{-1});
    CHECK(in_trip0("write_address") == std::vector<int>{1});
    CHECK(in_trip0("read_address") == std::vector<int>{1});
    CHECK(in_trip0("not_write_address") == std::vector<int>{0, 2});
    CHECK(in_trip0("not_read_address") == std::vector<int>{0, 2});
}

TEST_CASE("stimulus for an empty trip is all complements") {
    MemoryProgram p;
    p.trips.resize(1);
    const auto stim = stimulus_for(p, config_at(100e9, 3));
    CHECK(stim.size() == 6);
    CHECK(std::count_if(stim.begin(), stim.end(), [](const PulseEvent& e) { return e.line == "not_write_address"; }) == 3);
    CHECK(std::count_if(stim.begin(), stim.end(), [](const PulseEvent& e) { return e.line == "not_read_address"; }) == 3);
}

TEST_CASE("writing a zero asserts the address without data") {
    MemoryProgram p;
    p.trips = {{WriteOp{1, 0}, {}}};
    const auto stim = stimulus_for(p, config_at(100e9, 3));
    CHECK(std::none_of(stim.begin(), stim.end(), [](const PulseEvent& e) { return e.line == "write_data"; }));
    CHECK(std::count_if(stim.begin(), stim.end(), [](const PulseEvent& e) { return e.line == "write_address"; }) == 1);
}

TEST_CASE("property: address lines are complementary in every interval") {
    test::Gen g(42);
    for (int i = 0; i < 300; ++i) {
        const int n = g.integer(2, 8);
        const auto cfg = config_at(g.integer(20, 100) * 1e9, n);
        const auto program = g.program(n, 10);
        const auto plan = plan_timing(cfg);
        const auto stim = stimulus_for(program, cfg);
        for (int t = 0; t < static_cast<int>(program.trips.size()); ++t) {
            for (int k = 0; k < n; ++k) {
                const auto lo = plan.interval_start(t, k);
                const auto hi = lo + plan.interval;
                auto count = [&](const char* line) {
                    return std::count_if(stim.begin(), stim.end(), [&](const PulseEvent& e) {
                        return e.line == line && e.time >= lo && e.time < hi;
                    });
                };
                CHECK(count("write_address") + count("not_write_address") == 1);
                CHECK(count("read_address") + count("not_read_address") == 1);
            }
        }
    }
}

TEST_CASE("write, then read three times") {
    const auto cfg = config_at(100e9, 3);
    const auto r = run_program(write_read(), cfg);
    CHECK(r.pass);
    CHECK(r.trace.violations.empty());
    CHECK(r.reads == std::vector<ReadResult>{{0, 1, 1}, {1, 1, 1}, {2, 1, 1}});
    const auto plan = plan_timing(cfg);
    for (int t = 0; t < 3; ++t)
        CHECK(query_pulses(r.trace, "loop_data_in", plan.trip_start(t), plan.trip_start(t + 1)).count >= 1);
}

TEST_CASE("overwrite with zero empties the loop") {
    const auto cfg = config_at(100e9, 3);
    const auto plan = plan_timing(cfg);
    const auto r = run_program(overwrite(), cfg);
    CHECK(r.pass);
    const auto after = plan.write_clock(1, 1) + Femtoseconds{1};
    CHECK(query_pulses(r.trace, "loop_data_in", after, plan.trip_start(10)).count == 0);
    CHECK(query_pulses(r.trace, "loop_data_out", plan.trip_start(2), plan.trip_start(10)).count == 0);
    CHECK(r.reads == std::vector<ReadResult>{{0, 1, 1}, {2, 1, 0}, {3, 1, 0}});
}

TEST_CASE("never-written address reads zero") {
    MemoryProgram p;
    p.trips = {{std::nullopt, {0, 1, 2}}};
    const auto r = run_program(p, config_at(100e9, 3));
    CHECK(r.pass);
    CHECK(r.reads == std::vector<ReadResult>{{0, 0, 0}, {0, 1, 0}, {0, 2, 0}});
}

TEST_CASE("oracle: write priority and defaults") {
    CHECK(oracle(write_read(), 3) == std::vector<ReadResult>{{0, 1, 1}, {1, 1, 1}, {2, 1, 1}});
    MemoryProgram p;
    p.trips = {{WriteOp{2, 1}, {2}}};
    CHECK(oracle(p, 3) == std::vector<ReadResult>{{0, 2, 1}});
    p.trips = {{std::nullopt, {0}}};
    CHECK(oracle(p, 3) == std::vector<ReadResult>{{0, 0, 0}});
}

TEST_CASE("program validation") {
    MemoryProgram p;
    p.trips = {{WriteOp{3, 1}, {}}};
    CHECK_THROWS_AS(p.validate(3), ConfigError);
    p.trips = {{WriteOp{0, 2}, {}}};
    CHECK_THROWS_AS(p.validate(3), ConfigError);
    p.trips = {{std::nullopt, {1, 1}}};
    CHECK_THROWS_AS(p.validate(3), ConfigError);
    const auto parsed = parse_program(R"({"trips": [{"write": {"addr": 1, "bit": 1}, "reads": [1]}, {"reads": [1]}, {}]})");
    REQUIRE(parsed.trips.size() == 3);
    CHECK(parsed.trips[0].write == WriteOp{1, 1});
    CHECK_FALSE(parsed.trips[1].write);
    CHECK(program_from_json(program_to_json(parsed)) == parsed);
    CHECK_THROWS_AS(parse_program(R"({"trips": [{"write": {"addr": "x", "bit": 1}}]})"), ConfigError);
}

TEST_CASE("pulse spacing") {
    // 0.007 c at 100 GHz: about 21 um between bits.
    CHECK(pulse_spacing(0.007 * 2.998e8, 100e9) == doctest::Approx(21.0e-6).epsilon(0.3 / 21.0));
    CHECK(pulse_spacing(2.998e8, 1.0) == doctest::Approx(2.998e8));
    CHECK(pulse_spacing(0.298 * 2.998e8, 100e9) == doctest::Approx(0.298 * 2.998e8 / 1e11));
    CHECK(pulse_spacing(0.298 * 2.998e8, 100e9) == doctest::Approx(893.4e-6).epsilon(1e-3));
    CHECK_THROWS(pulse_spacing(0.0, 1.0));
}

TEST_CASE("property: simulated reads equal the oracle") {
    test::Gen g(43);
    for (int i = 0; i < 1000; ++i) {
        const int n = g.integer(2, 8);
        const double f = std::vector<double>{20e9, 50e9, 75e9, 100e9}[static_cast<std::size_t>(g.integer(0, 3))];
        const auto cfg = config_at(f, n);
        const auto program = g.program(n, 10);
        const auto r = run_program(program, cfg);
        CHECK(r.pass);
        CHECK(r.reads == oracle(program, n));
    }
}

TEST_CASE("property: read-only trips never disturb stored data") {
    test::Gen g(44);
    for (int i = 0; i < 200; ++i) {
        const int n = g.integer(2, 6);
        const auto cfg = config_at(100e9, n);
        auto program = g.program(n, 4);
        std::vector<int> all;
        for (int k = 0; k < n; ++k) all.push_back(k);
        program.trips.push_back({std::nullopt, all});
        const int extra = g.integer(1, 6);
        for (int e = 0; e < extra; ++e) program.trips.push_back({std::nullopt, g.coin() ? all : std::vector<int>{}});
        program.trips.push_back({std::nullopt, all});
        const auto r = run_program(program, cfg);
        REQUIRE(r.pass);
        std::vector<int> first, last;
        const int t_first = static_cast<int>(program.trips.size()) - extra - 2;
        const int t_last = static_cast<int>(program.trips.size()) - 1;
        for (const auto& rr : r.reads) {
            if (rr.trip == t_first) first.push_back(rr.bit);
            if (rr.trip == t_last) last.push_back(rr.bit);
        }
        CHECK(first == last);
    }
}

TEST_CASE("retiming window at 100 GHz") {
    const auto w = retiming_window(config_at(100e9, 3));
    // Recirculated bit leads its clock by 6.5 ps, written bit by 7.5 ps; setup 4 ps, hold 1 ps, 10 ps spacing.
    CHECK(w.hi == 2'500_fs);
    CHECK(w.lo == Femtoseconds{-1'500});
    CHECK(w.tolerance() == 1'499_fs);
}

TEST_CASE("bias outside every range fails the run with electrical violations") {
    const auto r = run_program(write_read(), config_at(100e9, 3), BiasPoint{0.5});
    CHECK_FALSE(r.pass);
    REQUIRE(r.trace.violations.size() == 5);
    for (const auto& v : r.trace.violations) CHECK(v.kind == ViolationKind::Electrical);
}

TEST_CASE("runs are byte-identical") {
    const auto cfg = config_at(100e9, 3);
    const auto a = run_program(overwrite(), cfg);
    const auto b = run_program(overwrite(), cfg);
    CHECK(a.trace.events == b.trace.events);
    CHECK(result_to_json(a).dump() == result_to_json(b).dump());
}

TEST_CASE("property: jitter inside the retiming window is absorbed") {
    test::Gen g(45);
    for (int i = 0; i < 250; ++i) {
        auto trial = test::retiming_trial(g);
        const auto baseline = run_program(trial.program, trial.cfg);
        REQUIRE(baseline.pass);
        const auto w = retiming_window(trial.cfg);
        trial.cfg.base.loop_jitter = test::jitter_for(trial.program, [&] {
            const int pick = g.integer(0, 9);
            if (pick == 0) return w.lo;
            if (pick == 1) return w.hi;
            return Femtoseconds{g.integer64(w.lo.count(), w.hi.count())};
        });
        const auto r = run_program(trial.program, trial.cfg);
        CHECK(r.pass);
        CHECK(r.reads == oracle(trial.program, trial.cfg.base.num_addresses));
        CHECK(pulses(r.trace, "loop_data_in") == pulses(baseline.trace, "loop_data_in"));
    }
}

TEST_CASE("property: jitter just beyond the retiming window is flagged") {
    test::Gen g(46);
    for (int i = 0; i < 250; ++i) {
        auto trial = test::retiming_trial(g);
        const auto w = retiming_window(trial.cfg);
        const auto& rc = trial.cfg.base.cells.at(kRecirc);
        const auto band = (rc.setup + rc.hold).count();
        const bool late = g.coin();
        const auto j = late ? w.hi + Femtoseconds{g.integer64(1, band - 1)}
                            : w.lo - Femtoseconds{g.integer64(1, band - 1)};
        trial.cfg.base.loop_jitter = test::jitter_for(trial.program, [&] { return j; });
        const auto r = run_program(trial.program, trial.cfg);
        const bool timing = std::any_of(r.trace.violations.begin(), r.trace.violations.end(), [](const TimingViolation& v) {
            return v.kind == ViolationKind::Setup || v.kind == ViolationKind::Hold;
        });
        CHECK(timing);
        CHECK_FALSE(r.pass);
    }
}
