#pragma once

// Simulation configuration: operating point, address count, per-cell parameters.
//
// Document schema (JSON; durations are strings with fs/ps/ns suffix):
//   {
//     "frequency": "100GHz" | <Hz>,          required
//     "num_addresses": 3,                    required
//     "bias": 1.0,
//     "header_interval": "10ps",             default: one address interval
//     "loop_jitter": ["0fs", "1ps", ...],    per-trip loop delay offsets
//     "max_events": 10000000,
//     "cells": { "<name>": { "prop", "prop1", "setup", "hold", "min_separation",
//                            "curve": [[ratio, multiplier], ...],
//                            "points": [[ratio, "delay"], ...], "points1": [...],
//                            "range": [lo, hi] } },
//     "memory": { ... }                      read by the memory module
//   }

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlmem/cells.hpp"
#include "dlmem/types.hpp"

namespace dlmem {

struct SimConfig {
    double frequency_hz = 100e9;
    int num_addresses = 3;
    BiasPoint bias{};
    std::optional<Femtoseconds> header_interval;
    std::vector<Femtoseconds> loop_jitter;
    std::uint64_t max_events = 10'000'000;
    std::map<std::string, CellParams> cells = default_cells();

    static std::map<std::string, CellParams> default_cells();
    void validate() const;
    const CellParams& cell(const std::string& name) const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Names of the configurable controller cells.
inline constexpr const char* kWriteDro = "write_dro";
inline constexpr const char* kRecirc = "recirc";
inline constexpr const char* kMerger = "merger";
inline constexpr const char* kFanout = "fanout";
inline constexpr const char* kRead = "read";

SimConfig parse_config(const std::string& text);
SimConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const SimConfig& cfg);
std::string serialize_config(const SimConfig& cfg);

/// 1/f in femtoseconds, rounded half up.
Femtoseconds interval_duration(double frequency_hz);
Femtoseconds interval_duration(const SimConfig& cfg);
Femtoseconds header_duration(const SimConfig& cfg);
/// Header plus num_addresses intervals.
Femtoseconds trip_duration(const SimConfig& cfg);

/// Convenience: reads a file into a string, throwing ConfigError("path") when unreadable.
std::string read_text_file(const std::string& path);

} // namespace dlmem
