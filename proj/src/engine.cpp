#include "dlmem/engine.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <tuple>

namespace dlmem {

void Netlist::add_input(const LineId& line) {
    if (line.empty()) throw EngineError("empty line name");
    inputs_.insert(line);
}

void Netlist::add_cell(CellInstance cell) {
    if (static_cast<int>(cell.inputs.size()) != input_count(cell.params.kind) ||
        static_cast<int>(cell.outputs.size()) != output_count(cell.params.kind))
        throw EngineError("cell '" + cell.name + "': wrong port count for " + std::string(to_string(cell.params.kind)));
    for (const auto& c : cells_)
        if (c.name == cell.name) throw EngineError("duplicate cell name '" + cell.name + "'");
    cells_.push_back(std::move(cell));
}

void Netlist::connect(Connection c) {
    if (c.jitter_period.count() < 0) throw EngineError("negative jitter period");
    if (!c.jitter.empty() && c.jitter_period.count() == 0) throw EngineError("jitter requires a positive period");
    connections_.push_back(std::move(c));
}

void Netlist::observe(const LineId& line) { observed_.insert(line); }

void Netlist::observe_all() {
    for (const auto& l : lines()) observed_.insert(l);
}

std::set<LineId> Netlist::lines() const {
    std::set<LineId> out(inputs_.begin(), inputs_.end());
    for (const auto& c : cells_) {
        out.insert(c.inputs.begin(), c.inputs.end());
        out.insert(c.outputs.begin(), c.outputs.end());
    }
    for (const auto& c : connections_) {
        out.insert(c.from);
        out.insert(c.to);
    }
    return out;
}

std::size_t Netlist::logic_cell_count() const {
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](const CellInstance& c) { return c.params.kind != CellKind::Sink; }));
}

void Netlist::validate() const {
    std::map<LineId, std::string> driver;
    auto drive = [&](const LineId& line, const std::string& who) {
        auto [it, fresh] = driver.emplace(line, who);
        if (!fresh) throw EngineError("line '" + line + "' driven by both " + it->second + " and " + who);
    };
    for (const auto& l : inputs_) drive(l, "external input");
    for (const auto& c : cells_)
        for (const auto& o : c.outputs) drive(o, "cell " + c.name);
    for (const auto& c : connections_) drive(c.to, "connection from " + c.from);
    for (const auto& l : observed_)
        if (!driver.count(l) && !lines().count(l)) throw EngineError("observed line '" + l + "' does not exist");
    for (const auto& c : cells_)
        for (const auto& i : c.inputs)
            if (!driver.count(i)) throw EngineError("input '" + i + "' of cell " + c.name + " has no driver");
    for (const auto& c : connections_)
        if (!driver.count(c.from)) throw EngineError("connection source '" + c.from + "' has no driver");

    // Zero-latency graph: line -> line through cells and plain wires. Only
    // delay-line connections may close a cycle.
    std::map<LineId, std::vector<LineId>> next;
    for (const auto& c : cells_)
        for (const auto& i : c.inputs)
            for (const auto& o : c.outputs) next[i].push_back(o);
    for (const auto& c : connections_)
        if (!c.delay_line) next[c.from].push_back(c.to);
    std::map<LineId, int> color;
    std::function<void(const LineId&)> visit = [&](const LineId& l) {
        color[l] = 1;
        for (const auto& n : next[l]) {
            if (color[n] == 1) throw EngineError("feedback cycle through '" + n + "' bypasses the delay line");
            if (color[n] == 0) visit(n);
        }
        color[l] = 2;
    };
    for (const auto& l : lines())
        if (color[l] == 0) visit(l);
}

struct CompiledNetlist {
    struct Sink {
        std::size_t cell;
        int port;
    };
    struct Wire {
        std::size_t to;
        Femtoseconds delay;
        std::vector<Femtoseconds> jitter;
        Femtoseconds period;
    };
    std::vector<LineId> names; // sorted: index order is name order
    std::map<LineId, std::size_t> index;
    std::vector<bool> external;
    std::vector<bool> observed;
    std::vector<std::vector<Sink>> sinks;
    std::vector<std::vector<Wire>> wires;
    std::vector<CellInstance> cells;
    std::vector<std::vector<std::size_t>> cell_outputs;
};

PreparedRun schedule(const Netlist& netlist, std::vector<PulseEvent> stimulus) {
    netlist.validate();
    auto net = std::make_shared<CompiledNetlist>();
    for (const auto& l : netlist.lines()) {
        net->index.emplace(l, net->names.size());
        net->names.push_back(l);
    }
    const auto n = net->names.size();
    net->external.assign(n, false);
    net->observed.assign(n, false);
    net->sinks.resize(n);
    net->wires.resize(n);
    for (const auto& l : netlist.inputs()) net->external[net->index.at(l)] = true;
    for (const auto& l : netlist.observed()) net->observed[net->index.at(l)] = true;
    net->cells = netlist.cells();
    for (std::size_t c = 0; c < net->cells.size(); ++c) {
        const auto& cell = net->cells[c];
        for (std::size_t p = 0; p < cell.inputs.size(); ++p)
            net->sinks[net->index.at(cell.inputs[p])].push_back({c, static_cast<int>(p)});
        std::vector<std::size_t> outs;
        for (const auto& o : cell.outputs) outs.push_back(net->index.at(o));
        net->cell_outputs.push_back(std::move(outs));
    }
    for (const auto& w : netlist.connections())
        net->wires[net->index.at(w.from)].push_back({net->index.at(w.to), w.delay, w.jitter, w.jitter_period});

    for (const auto& e : stimulus) {
        auto it = net->index.find(e.line);
        if (it == net->index.end()) throw EngineError("stimulus on unknown line '" + e.line + "'");
        if (!net->external[it->second]) throw EngineError("stimulus on non-input line '" + e.line + "'");
        if (e.time.count() < 0) throw EngineError("stimulus at negative time on '" + e.line + "'");
    }
    std::sort(stimulus.begin(), stimulus.end());
    auto dup = std::adjacent_find(stimulus.begin(), stimulus.end());
    if (dup != stimulus.end())
        throw EngineError("duplicate pulse on '" + dup->line + "' at " + format_duration(dup->time));
    PreparedRun run;
    run.net = std::move(net);
    run.stimulus = std::move(stimulus);
    return run;
}

namespace {

struct QueuedEvent {
    std::int64_t time;
    std::size_t line;
    std::uint64_t seq;

    bool operator>(const QueuedEvent& o) const {
        return std::tie(time, line, seq) > std::tie(o.time, o.line, o.seq);
    }
};

} // namespace

Trace run_until(const PreparedRun& run, TimeStamp t_end, BiasPoint bias, const RunOptions& options) {
    if (!run.net) throw EngineError("run was not prepared");
    if (t_end.count() < 0) throw EngineError("negative end time");
    const auto& net = *run.net;

    Trace trace;
    trace.config_echo = options.config_echo;
    for (std::size_t i = 0; i < net.names.size(); ++i)
        if (net.observed[i]) trace.lines.push_back(net.names[i]);

    std::vector<CellState> states(net.cells.size());
    std::vector<bool> inert(net.cells.size(), false);
    for (std::size_t c = 0; c < net.cells.size(); ++c) {
        if (net.cells[c].params.in_range(bias)) continue;
        inert[c] = true;
        trace.violations.push_back({net.cells[c].name, ViolationKind::Electrical, TimeStamp{0},
                                    "bias " + std::to_string(bias.ratio) + " outside operating range"});
    }

    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue;
    std::uint64_t seq = 0;
    for (const auto& e : run.stimulus) queue.push({e.time.count(), net.index.at(e.line), seq++});

    std::vector<std::int64_t> last_seen(net.names.size(), -1);
    std::uint64_t processed = 0;
    while (!queue.empty() && queue.top().time < t_end.count()) {
        const QueuedEvent ev = queue.top();
        queue.pop();
        if (++processed > options.max_events || queue.size() > options.max_events)
            throw RunawayError("event count exceeded " + std::to_string(options.max_events));
        const TimeStamp t{ev.time};
        if (last_seen[ev.line] == ev.time) {
            trace.violations.push_back({net.names[ev.line], ViolationKind::Electrical, t,
                                        "coincident pulses on one line; duplicate dropped"});
            continue;
        }
        last_seen[ev.line] = ev.time;
        if (net.observed[ev.line]) trace.events.push_back({t, net.names[ev.line]});

        for (const auto& s : net.sinks[ev.line]) {
            if (inert[s.cell]) continue;
            const auto& cell = net.cells[s.cell];
            auto r = step_cell(cell.params, states[s.cell], s.port, t, bias, cell.name);
            states[s.cell] = r.state;
            for (auto& v : r.violations) trace.violations.push_back(std::move(v));
            for (const auto& e : r.emitted)
                queue.push({e.time.count(), net.cell_outputs[s.cell][static_cast<std::size_t>(e.port)], seq++});
        }
        for (const auto& w : net.wires[ev.line]) {
            Femtoseconds d = w.delay;
            if (!w.jitter.empty()) {
                const auto k = static_cast<std::size_t>(ev.time / w.period.count());
                if (k < w.jitter.size()) d += w.jitter[k];
            }
            queue.push({ev.time + std::max<std::int64_t>(d.count(), 1), w.to, seq++});
        }
    }
    for (std::size_t c = 0; c < net.cells.size(); ++c) trace.final_states.emplace(net.cells[c].name, states[c]);
    return trace;
}

PulseQuery query_pulses(const Trace& trace, const LineId& line, TimeStamp t0, TimeStamp t1) {
    if (!(t0 < t1)) throw EngineError("query window must satisfy t0 < t1");
    if (!std::binary_search(trace.lines.begin(), trace.lines.end(), line))
        throw EngineError("line '" + line + "' is not in the trace");
    PulseQuery q;
    for (const auto& e : trace.events)
        if (e.line == line && e.time >= t0 && e.time < t1) q.times.push_back(e.time);
    q.count = q.times.size();
    return q;
}

} // namespace dlmem
