#include "dlmem/memory.hpp"

#include <cmath>
#include <set>

namespace dlmem {

using nlohmann::json;

namespace {

Femtoseconds fraction_of(Femtoseconds span, double phase) {
    return Femtoseconds{static_cast<std::int64_t>(std::floor(static_cast<double>(span.count()) * phase + 0.5))};
}

void check_phase(double v, const char* field) {
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError(std::string("memory.") + field, "must lie in [0, 1)");
}

// Spacing between consecutive clocks seen by a cell that is clocked once per address interval.
Femtoseconds clock_gap(const SimConfig& cfg) {
    return cfg.num_addresses >= 2 ? interval_duration(cfg) : trip_duration(cfg);
}

} // namespace

void MemoryConfig::validate() const {
    base.validate();
    if (phase_read) check_phase(*phase_read, "phase_read");
    check_phase(phase_write, "phase_write");
    check_phase(phase_data, "phase_data");
    if (loop_delay && loop_delay->count() <= 0) throw ConfigError("memory.loop_delay", "must be positive");
}

MemoryConfig memory_config_from_json(const json& doc) {
    MemoryConfig cfg;
    cfg.base = config_from_json(doc);
    if (doc.contains("memory")) {
        const auto& m = doc.at("memory");
        if (!m.is_object()) throw ConfigError("memory", "expected an object");
        for (const auto& [key, v] : m.items()) {
            const std::string field = "memory." + key;
            if (key == "phase_read" || key == "phase_write" || key == "phase_data") {
                if (!v.is_number()) throw ConfigError(field, "expected a number");
                const double p = v.get<double>();
                if (key == "phase_read") cfg.phase_read = p;
                else if (key == "phase_write") cfg.phase_write = p;
                else cfg.phase_data = p;
            } else if (key == "loop_delay") {
                if (!v.is_string()) throw ConfigError(field, "expected a duration string with unit suffix");
                try {
                    cfg.loop_delay = parse_duration(v.get<std::string>());
                } catch (const Error& e) {
                    throw ConfigError(field, e.what());
                }
            } else {
                throw ConfigError(field, "unknown field");
            }
        }
    }
    cfg.validate();
    return cfg;
}

MemoryConfig parse_memory_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("document", e.what());
    }
    return memory_config_from_json(doc);
}

std::string serialize_memory_config(const MemoryConfig& cfg) {
    json doc = config_to_json(cfg.base);
    json m = json::object();
    if (cfg.phase_read) m["phase_read"] = *cfg.phase_read;
    m["phase_write"] = cfg.phase_write;
    m["phase_data"] = cfg.phase_data;
    if (cfg.loop_delay) m["loop_delay"] = format_duration(*cfg.loop_delay);
    doc["memory"] = m;
    return doc.dump(2);
}

Femtoseconds recirculation_path(const SimConfig& cfg, BiasPoint bias) {
    return cfg.cell(kRecirc).delay.at(bias) + cfg.cell(kMerger).delay.at(bias) + cfg.cell(kFanout).delay.at(bias);
}

Femtoseconds write_path(const SimConfig& cfg, BiasPoint bias) {
    return cfg.cell(kWriteDro).delay.at(bias) + cfg.cell(kMerger).delay.at(bias) + cfg.cell(kFanout).delay.at(bias);
}

Femtoseconds required_loop_delay(const MemoryConfig& cfg) {
    const auto& base = cfg.base;
    const auto trip = trip_duration(base);
    const auto p_rec = recirculation_path(base);
    const auto p_w = write_path(base);
    if (p_rec >= trip || p_w >= trip)
        throw InfeasibleError("controller path " + format_ps(std::max(p_rec, p_w)) + " does not fit in a " +
                              format_ps(trip) + " trip");
    // Land the recirculated bit midway between the previous clock's hold edge
    // and the matching clock's setup edge, one trip later.
    const auto& rc = base.cell(kRecirc);
    const auto margin = (clock_gap(base) - rc.hold + rc.setup) / 2;
    const auto loop = trip - p_rec - margin;
    if (loop.count() <= 0)
        throw InfeasibleError("no positive loop delay fits a " + format_ps(trip) + " trip");
    return loop;
}

TimingPlan plan_timing(const MemoryConfig& cfg) {
    cfg.validate();
    const auto& base = cfg.base;
    TimingPlan plan;
    plan.num_addresses = base.num_addresses;
    plan.interval = interval_duration(base);
    plan.header = header_duration(base);
    plan.trip = trip_duration(base);
    plan.data_offset = fraction_of(plan.header, cfg.phase_data);
    plan.write_offset = fraction_of(plan.interval, cfg.phase_write);
    plan.loop_delay = cfg.loop_delay ? *cfg.loop_delay : required_loop_delay(cfg);
    if (cfg.phase_read) {
        plan.read_offset = fraction_of(plan.interval, *cfg.phase_read);
    } else {
        // Read pulses go after the previous interval's data has clocked the
        // read DRO2R (plus hold) and before this interval's data arrives (minus setup).
        const auto p_rec = recirculation_path(base);
        const auto p_w = write_path(base);
        const auto& rd = base.cell(kRead);
        const auto lo = std::max(p_rec, p_w) + rd.hold - clock_gap(base);
        const auto hi = std::min(p_rec, p_w) - rd.setup;
        auto rho = lo + (hi - lo) / 2;
        rho = std::clamp(rho, -plan.write_offset, plan.interval - Femtoseconds{1} - plan.write_offset);
        plan.read_offset = plan.write_offset + rho;
    }
    return plan;
}

JitterWindow retiming_window(const MemoryConfig& cfg) {
    const auto plan = plan_timing(cfg);
    const auto& base = cfg.base;
    const auto& rc = base.cell(kRecirc);
    const auto gap = clock_gap(base);
    JitterWindow w{Femtoseconds::min(), Femtoseconds::max()};
    for (auto p : {recirculation_path(base), write_path(base)}) {
        // Time from the bit's arrival at loop_data_out to the clock that retimes it.
        const auto lead = plan.trip - p - plan.loop_delay;
        w.hi = std::min(w.hi, lead - rc.setup);
        w.lo = std::max(w.lo, lead + rc.hold - gap);
    }
    return w;
}

Netlist build_controller(const MemoryConfig& cfg) { return build_controller(cfg, plan_timing(cfg)); }

Netlist build_controller(const MemoryConfig& cfg, const TimingPlan& plan) {
    using namespace lines;
    const auto& base = cfg.base;
    Netlist net;
    for (const char* in : {kWriteData, kWriteAddress, kNotWriteAddress, kReadAddress, kNotReadAddress})
        net.add_input(in);
    net.add_cell({kWriteDro, base.cell(kWriteDro), {kWriteData, kWriteAddress}, {kWriteDroOut}});
    net.add_cell({kRecirc, base.cell(kRecirc), {kLoopDataOut, kNotWriteAddress, kWriteAddress}, {kRecircOut, kRecircDiscard}});
    net.add_cell({kMerger, base.cell(kMerger), {kWriteDroOut, kRecircOut}, {kMergerOut}});
    net.add_cell({kFanout, base.cell(kFanout), {kMergerOut}, {kLoopDataIn, kReadClock}});
    net.add_cell({kRead, base.cell(kRead), {kReadAddress, kReadClock, kNotReadAddress}, {kReadData, kReadDiscard}});
    net.add_cell({"recirc_sink", CellParams::sink(), {kRecircDiscard}, {}});
    net.add_cell({"read_sink", CellParams::sink(), {kReadDiscard}, {}});
    Connection loop;
    loop.from = kLoopDataIn;
    loop.to = kLoopDataOut;
    loop.delay = plan.loop_delay;
    loop.delay_line = true;
    loop.jitter = base.loop_jitter;
    loop.jitter_period = plan.trip;
    net.connect(loop);
    net.observe_all();
    return net;
}

void MemoryProgram::validate(int num_addresses) const {
    for (std::size_t t = 0; t < trips.size(); ++t) {
        const std::string field = "trips[" + std::to_string(t) + "]";
        if (const auto& w = trips[t].write) {
            if (w->address < 0 || w->address >= num_addresses)
                throw ConfigError(field + ".write.addr", "address out of range");
            if (w->bit != 0 && w->bit != 1) throw ConfigError(field + ".write.bit", "must be 0 or 1");
        }
        std::set<int> seen;
        for (int a : trips[t].reads) {
            if (a < 0 || a >= num_addresses) throw ConfigError(field + ".reads", "address out of range");
            if (!seen.insert(a).second) throw ConfigError(field + ".reads", "duplicate address");
        }
    }
}

MemoryProgram program_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("trips") || !doc.at("trips").is_array())
        throw ConfigError("trips", "expected {\"trips\": [...]}");
    MemoryProgram program;
    const auto& trips = doc.at("trips");
    for (std::size_t t = 0; t < trips.size(); ++t) {
        const std::string field = "trips[" + std::to_string(t) + "]";
        const auto& e = trips[t];
        if (!e.is_object()) throw ConfigError(field, "expected an object");
        TripOps ops;
        if (e.contains("write") && !e.at("write").is_null()) {
            const auto& w = e.at("write");
            if (!w.is_object() || !w.contains("addr") || !w.contains("bit") || !w.at("addr").is_number_integer() ||
                !w.at("bit").is_number_integer())
                throw ConfigError(field + ".write", "expected {\"addr\": int, \"bit\": 0|1}");
            ops.write = WriteOp{w.at("addr").get<int>(), w.at("bit").get<int>()};
        }
        if (e.contains("reads")) {
            const auto& r = e.at("reads");
            if (!r.is_array()) throw ConfigError(field + ".reads", "expected a list of addresses");
            for (const auto& a : r) {
                if (!a.is_number_integer()) throw ConfigError(field + ".reads", "expected integer addresses");
                ops.reads.push_back(a.get<int>());
            }
        }
        for (const auto& [key, _] : e.items())
            if (key != "write" && key != "reads") throw ConfigError(field + "." + key, "unknown field");
        program.trips.push_back(std::move(ops));
    }
    return program;
}

MemoryProgram parse_program(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("document", e.what());
    }
    return program_from_json(doc);
}

json program_to_json(const MemoryProgram& program) {
    json trips = json::array();
    for (const auto& t : program.trips) {
        json e;
        e["write"] = t.write ? json{{"addr", t.write->address}, {"bit", t.write->bit}} : json(nullptr);
        e["reads"] = t.reads;
        trips.push_back(e);
    }
    return json{{"trips", trips}};
}

std::vector<PulseEvent> stimulus_for(const MemoryProgram& program, const TimingPlan& plan) {
    using namespace lines;
    std::vector<PulseEvent> out;
    for (int t = 0; t < static_cast<int>(program.trips.size()); ++t) {
        const auto& ops = program.trips[static_cast<std::size_t>(t)];
        if (ops.write && ops.write->bit == 1) out.push_back({plan.trip_start(t) + plan.data_offset, kWriteData});
        const std::set<int> reads(ops.reads.begin(), ops.reads.end());
        for (int k = 0; k < plan.num_addresses; ++k) {
            const bool w = ops.write && ops.write->address == k;
            out.push_back({plan.write_clock(t, k), w ? kWriteAddress : kNotWriteAddress});
            out.push_back({plan.read_pulse(t, k), reads.count(k) ? kReadAddress : kNotReadAddress});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PulseEvent> stimulus_for(const MemoryProgram& program, const MemoryConfig& cfg) {
    program.validate(cfg.base.num_addresses);
    return stimulus_for(program, plan_timing(cfg));
}

MemoryResult run_program(const MemoryProgram& program, const MemoryConfig& cfg, std::optional<BiasPoint> bias) {
    program.validate(cfg.base.num_addresses);
    const auto plan = plan_timing(cfg);
    const BiasPoint b = bias.value_or(cfg.base.bias);
    const auto prepared = schedule(build_controller(cfg, plan), stimulus_for(program, plan));
    const int trips = static_cast<int>(program.trips.size());
    RunOptions options;
    options.max_events = cfg.base.max_events;
    MemoryResult result;
    result.trace = run_until(prepared, plan.trip_start(trips + 1), b, options);

    const auto& read_cell = cfg.base.cell(kRead);
    const auto prop = read_cell.delay.in_range(b) ? read_cell.delay.at(b) : read_cell.delay.nominal();
    std::vector<TimeStamp> read_data;
    for (const auto& e : result.trace.events)
        if (e.line == lines::kReadData) read_data.push_back(e.time);
    std::vector<bool> claimed(read_data.size(), false);
    for (int t = 0; t < trips; ++t) {
        std::set<int> reads(program.trips[static_cast<std::size_t>(t)].reads.begin(),
                            program.trips[static_cast<std::size_t>(t)].reads.end());
        for (int k : reads) {
            const auto lo = plan.read_pulse(t, k) + prop;
            const auto hi = lo + plan.interval;
            int bit = 0;
            for (std::size_t i = 0; i < read_data.size(); ++i) {
                if (read_data[i] < lo || read_data[i] >= hi) continue;
                if (bit == 1 || claimed[i])
                    result.anomalies.push_back("extra read_data pulse at " + format_duration(read_data[i]));
                bit = 1;
                claimed[i] = true;
            }
            result.reads.push_back({t, k, bit});
        }
    }
    for (std::size_t i = 0; i < read_data.size(); ++i)
        if (!claimed[i]) result.anomalies.push_back("unattributed read_data pulse at " + format_duration(read_data[i]));
    result.pass = result.trace.violations.empty() && result.anomalies.empty();
    return result;
}

std::vector<ReadResult> oracle(const MemoryProgram& program, int num_addresses) {
    std::vector<int> bits(static_cast<std::size_t>(num_addresses), 0);
    std::vector<ReadResult> out;
    for (int t = 0; t < static_cast<int>(program.trips.size()); ++t) {
        const auto& ops = program.trips[static_cast<std::size_t>(t)];
        if (ops.write) bits[static_cast<std::size_t>(ops.write->address)] = ops.write->bit;
        std::set<int> reads(ops.reads.begin(), ops.reads.end());
        for (int k : reads) out.push_back({t, k, bits[static_cast<std::size_t>(k)]});
    }
    return out;
}

double pulse_spacing(double velocity_m_per_s, double frequency_hz) {
    if (!(velocity_m_per_s > 0.0) || !(frequency_hz > 0.0))
        throw std::invalid_argument("velocity and frequency must be positive");
    return velocity_m_per_s / frequency_hz;
}

json result_to_json(const MemoryResult& result) {
    json reads = json::array();
    for (const auto& r : result.reads) reads.push_back({{"trip", r.trip}, {"addr", r.address}, {"bit", r.bit}});
    json violations = json::array();
    for (const auto& v : result.trace.violations)
        violations.push_back({{"cell", v.cell},
                              {"kind", std::string(to_string(v.kind))},
                              {"time_fs", v.time.count()},
                              {"detail", v.detail}});
    return json{{"pass", result.pass},
                {"reads", reads},
                {"violations", violations},
                {"anomalies", result.anomalies},
                {"pulses", result.trace.events.size()}};
}

} // namespace dlmem
