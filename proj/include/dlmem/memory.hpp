#pragma once

// The delay-line memory: controller netlist, address timing, stimulus
// generation, read decoding and the abstract-array reference model.
//
// Each trip is a header interval followed by num_addresses address intervals.
// In address interval k exactly one of write_address/not_write_address fires at
// the write phase and exactly one of read_address/not_read_address at the read
// phase. write_data fires in the header when the trip writes a 1.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlmem/config.hpp"
#include "dlmem/engine.hpp"

namespace dlmem {

namespace lines {
inline constexpr const char* kWriteData = "write_data";
inline constexpr const char* kWriteAddress = "write_address";
inline constexpr const char* kNotWriteAddress = "not_write_address";
inline constexpr const char* kReadAddress = "read_address";
inline constexpr const char* kNotReadAddress = "not_read_address";
inline constexpr const char* kWriteDroOut = "write_dro_out";
inline constexpr const char* kRecircOut = "recirc_out";
inline constexpr const char* kRecircDiscard = "recirc_discard";
inline constexpr const char* kMergerOut = "merger_out";
inline constexpr const char* kLoopDataIn = "loop_data_in";
inline constexpr const char* kLoopDataOut = "loop_data_out";
inline constexpr const char* kReadClock = "read_clock";
inline constexpr const char* kReadData = "read_data";
inline constexpr const char* kReadDiscard = "read_discard";
} // namespace lines

struct MemoryConfig {
    SimConfig base;
    std::optional<double> phase_read; // default derived from cell delays
    double phase_write = 0.5;
    double phase_data = 0.5;
    std::optional<Femtoseconds> loop_delay; // default: required_loop_delay

    void validate() const;
    friend bool operator==(const MemoryConfig&, const MemoryConfig&) = default;
};

MemoryConfig parse_memory_config(const std::string& text);
MemoryConfig memory_config_from_json(const nlohmann::json& doc);
std::string serialize_memory_config(const MemoryConfig& cfg);

/// Absolute schedule of one operating point. All offsets are within-interval.
struct TimingPlan {
    int num_addresses = 0;
    Femtoseconds interval{0};
    Femtoseconds header{0};
    Femtoseconds trip{0};
    Femtoseconds data_offset{0};  // write_data, from trip start
    Femtoseconds write_offset{0}; // write_address / not_write_address
    Femtoseconds read_offset{0};  // read_address / not_read_address
    Femtoseconds loop_delay{0};

    TimeStamp trip_start(int t) const { return trip * t; }
    TimeStamp interval_start(int t, int k) const { return trip_start(t) + header + interval * k; }
    TimeStamp write_clock(int t, int k) const { return interval_start(t, k) + write_offset; }
    TimeStamp read_pulse(int t, int k) const { return interval_start(t, k) + read_offset; }
};

/// Nominal-bias path from the not_write_address clock through the recirculation
/// DRO2R, merger and fan-out to loop_data_in.
Femtoseconds recirculation_path(const SimConfig& cfg, BiasPoint bias = BiasPoint{1.0});
/// Same from write_address through the write DRO.
Femtoseconds write_path(const SimConfig& cfg, BiasPoint bias = BiasPoint{1.0});

/// Loop delay that lands a recirculated bit centred in the recirculation
/// DRO2R's setup/hold window one trip later. Throws InfeasibleError when the
/// controller path does not fit in a trip.
Femtoseconds required_loop_delay(const MemoryConfig& cfg);

/// Throws InfeasibleError when no phase placement fits.
TimingPlan plan_timing(const MemoryConfig& cfg);

/// Range of per-trip loop jitter the recirculation clock can absorb without a
/// setup or hold violation at nominal bias. lo ≤ 0 ≤ hi.
struct JitterWindow {
    Femtoseconds lo{0};
    Femtoseconds hi{0};
    /// Largest symmetric magnitude strictly inside [lo, hi].
    Femtoseconds tolerance() const { return std::min(hi, -lo) - Femtoseconds{1}; }
};
JitterWindow retiming_window(const MemoryConfig& cfg);

Netlist build_controller(const MemoryConfig& cfg);
Netlist build_controller(const MemoryConfig& cfg, const TimingPlan& plan);

struct WriteOp {
    int address = 0;
    int bit = 0;
    friend bool operator==(const WriteOp&, const WriteOp&) = default;
};

struct TripOps {
    std::optional<WriteOp> write;
    std::vector<int> reads;
    friend bool operator==(const TripOps&, const TripOps&) = default;
};

/// Document: {"trips": [{"write": {"addr": 1, "bit": 1} | null, "reads": [1]}, ...]}
struct MemoryProgram {
    std::vector<TripOps> trips;

    void validate(int num_addresses) const;
    friend bool operator==(const MemoryProgram&, const MemoryProgram&) = default;
};

MemoryProgram parse_program(const std::string& text);
MemoryProgram program_from_json(const nlohmann::json& doc);
nlohmann::json program_to_json(const MemoryProgram& program);

struct ReadResult {
    int trip = 0;
    int address = 0;
    int bit = 0;
    friend bool operator==(const ReadResult&, const ReadResult&) = default;
};

struct MemoryResult {
    std::vector<ReadResult> reads; // by trip, then address
    Trace trace;
    bool pass = false;
    std::vector<std::string> anomalies;
};

std::vector<PulseEvent> stimulus_for(const MemoryProgram& program, const TimingPlan& plan);
std::vector<PulseEvent> stimulus_for(const MemoryProgram& program, const MemoryConfig& cfg);

/// Runs at cfg.base.bias unless a bias is given.
MemoryResult run_program(const MemoryProgram& program, const MemoryConfig& cfg,
                         std::optional<BiasPoint> bias = std::nullopt);

/// Abstract bit array; writes land before the same trip's reads.
std::vector<ReadResult> oracle(const MemoryProgram& program, int num_addresses);

/// Physical distance between consecutive bits on the line.
double pulse_spacing(double velocity_m_per_s, double frequency_hz);

/// JSON summary of a run (reads, pass flag, violations, anomalies).
nlohmann::json result_to_json(const MemoryResult& result);

} // namespace dlmem
