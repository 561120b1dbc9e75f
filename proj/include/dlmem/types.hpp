#pragma once

// Foundational value types shared by every module: exact femtosecond time,
// pulse events on named lines, bias points and the error hierarchy.

#include <chrono>
#include <compare>
#include <cstdint>
#include <ratio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dlmem {

/// Exact integer time. All schedule arithmetic stays in this unit.
using Femtoseconds = std::chrono::duration<std::int64_t, std::femto>;
using TimeStamp = Femtoseconds;

namespace literals {
constexpr Femtoseconds operator""_fs(unsigned long long v) { return Femtoseconds{static_cast<std::int64_t>(v)}; }
constexpr Femtoseconds operator""_ps(unsigned long long v) { return Femtoseconds{static_cast<std::int64_t>(v) * 1000}; }
constexpr Femtoseconds operator""_ns(unsigned long long v) { return Femtoseconds{static_cast<std::int64_t>(v) * 1000000}; }
} // namespace literals

/// Name of a signal line (e.g. "write_data", "loop_data_in").
using LineId = std::string;

/// A single SFQ pulse: the only unit of information flow.
struct PulseEvent {
    TimeStamp time{0};
    LineId line;

    friend bool operator==(const PulseEvent&, const PulseEvent&) = default;
    friend auto operator<=>(const PulseEvent& a, const PulseEvent& b) {
        if (auto c = a.time <=> b.time; c != 0) return c;
        return a.line <=> b.line;
    }
};

/// Supply bias as a fraction of nominal (1.0 = nominal).
struct BiasPoint {
    double ratio = 1.0;

    constexpr BiasPoint() = default;
    explicit BiasPoint(double r);

    friend bool operator==(const BiasPoint&, const BiasPoint&) = default;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Schema or semantic violation in a configuration/program document.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// The requested operating point cannot be scheduled (controller path too long).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// A bias ratio outside a cell's operating range.
class ElectricalRangeError : public Error {
public:
    using Error::Error;
};

/// Netlist, scheduling or runtime failure inside the event kernel.
class EngineError : public Error {
public:
    using Error::Error;
};

class RunawayError : public EngineError {
public:
    using EngineError::EngineError;
};

/// Parses "10ps", "0.5 ps", "-250fs", "1ns" into femtoseconds (rounded to nearest).
Femtoseconds parse_duration(std::string_view text);

/// Parses "100GHz", "75 GHz", "2e10" (bare numbers are Hz).
double parse_frequency(std::string_view text);

/// Canonical text form, always in fs ("10000fs").
std::string format_duration(Femtoseconds d);

/// Human-friendly picoseconds with up to three decimals ("5.75ps").
std::string format_ps(Femtoseconds d);

} // namespace dlmem
