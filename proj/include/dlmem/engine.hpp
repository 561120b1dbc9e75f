#pragma once

// Discrete-event kernel. A netlist joins cell ports with named lines and
// delay-annotated connections; run_until plays a stimulus through it and
// records every pulse on observed lines plus all timing violations.
//
// Port order per kind (inputs -> outputs):
//   DRO    [data, clock]          -> [out]
//   DRO2R  [data, clock0, clock1] -> [out0, out1]
//   MERGER [in0, in1]             -> [out]
//   FANOUT [in]                   -> [out_a, out_b]
//   SINK   [in]                   -> []

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dlmem/cells.hpp"
#include "dlmem/types.hpp"

namespace dlmem {

struct CellInstance {
    std::string name;
    CellParams params;
    std::vector<LineId> inputs;
    std::vector<LineId> outputs;
};

/// A wire from one line to another. Delay-line connections may close the
/// storage loop; jitter[k] is added to pulses entering during [k·period, (k+1)·period).
struct Connection {
    LineId from;
    LineId to;
    Femtoseconds delay{0};
    bool delay_line = false;
    std::vector<Femtoseconds> jitter;
    Femtoseconds jitter_period{0};
};

class Netlist {
public:
    void add_input(const LineId& line);
    void add_cell(CellInstance cell);
    void connect(Connection c);
    void observe(const LineId& line);
    void observe_all();

    /// Throws EngineError on dangling lines, multiple drivers or a combinational cycle.
    void validate() const;

    const std::set<LineId>& inputs() const noexcept { return inputs_; }
    const std::vector<CellInstance>& cells() const noexcept { return cells_; }
    const std::vector<Connection>& connections() const noexcept { return connections_; }
    const std::set<LineId>& observed() const noexcept { return observed_; }
    std::set<LineId> lines() const;
    /// Cells other than sinks.
    std::size_t logic_cell_count() const;

private:
    std::set<LineId> inputs_;
    std::vector<CellInstance> cells_;
    std::vector<Connection> connections_;
    std::set<LineId> observed_;
};

struct CompiledNetlist;

/// A validated netlist plus its loaded stimulus. Immutable; one prepared run
/// can be executed any number of times, concurrently.
struct PreparedRun {
    std::shared_ptr<const CompiledNetlist> net;
    std::vector<PulseEvent> stimulus; // sorted

    std::size_t queue_size() const noexcept { return stimulus.size(); }
};

struct RunOptions {
    std::uint64_t max_events = 10'000'000;
    std::string config_echo;
};

struct Trace {
    std::vector<PulseEvent> events; // sorted by (time, line)
    std::vector<TimingViolation> violations;
    std::vector<LineId> lines;      // observed lines, sorted
    std::map<std::string, CellState> final_states;
    std::string config_echo;

    bool clean() const noexcept { return violations.empty(); }
};

struct PulseQuery {
    std::size_t count = 0;
    std::vector<TimeStamp> times;
};

/// Validates the netlist and loads the stimulus. Errors on unknown or
/// non-input lines, negative times and duplicate (time, line) pulses.
PreparedRun schedule(const Netlist& netlist, std::vector<PulseEvent> stimulus);

/// Processes every event with time < t_end in (time, line, insertion) order.
Trace run_until(const PreparedRun& run, TimeStamp t_end, BiasPoint bias, const RunOptions& options = {});

/// Pulses on line within [t0, t1).
PulseQuery query_pulses(const Trace& trace, const LineId& line, TimeStamp t0, TimeStamp t1);

} // namespace dlmem
