#pragma once

// Static timing over min/max delay intervals, cell characterization in the
// assembled memory, maximum-frequency search and the 1%-step bias margin search.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dlmem/memory.hpp"

namespace dlmem {

enum class Limiter { Setup, Hold, Electrical, Functional, None };

std::string_view to_string(Limiter limiter);

/// Arrival times relative to the start of an address interval.
struct ArrivalWindow {
    Femtoseconds earliest{0};
    Femtoseconds latest{0};
};

struct SlackEntry {
    std::string constraint;
    std::string cell;
    ViolationKind kind = ViolationKind::Setup;
    Femtoseconds slack{0};
};

struct StaReport {
    double frequency_hz = 0.0;
    double r_lo = 1.0;
    double r_hi = 1.0;
    std::map<std::string, ArrivalWindow> windows;
    std::vector<SlackEntry> slacks;

    Femtoseconds worst_slack() const;
    const SlackEntry& worst() const;
    /// Every slack is at least guard.
    bool clean(Femtoseconds guard = Femtoseconds{0}) const;
};

/// Copy of cfg retargeted to frequency_hz. A frequency change drops an
/// explicit loop delay so the derived one follows the new trip length.
MemoryConfig at_frequency(const MemoryConfig& cfg, double frequency_hz);

/// Delays are taken as [delay(r_hi), delay(r_lo)] for every cell. Throws
/// ElectricalRangeError when [r_lo, r_hi] leaves any cell's range and
/// InfeasibleError when the controller cannot be scheduled.
StaReport sta(const MemoryConfig& cfg, double frequency_hz, double r_lo, double r_hi);

struct MaxFrequencyOptions {
    double ceiling_hz = 1e12;
    double step_hz = 1e9;
};

/// Largest frequency on the step grid, searched downward from the ceiling,
/// whose nominal-bias STA has no negative slack. Returns 0 if none does.
double max_frequency(const MemoryConfig& cfg, const MaxFrequencyOptions& options = {});

struct DelaySample {
    double bias = 1.0;
    Femtoseconds delay{0};
};

/// Trigger and output lines used to measure a controller cell in place.
struct ProbePoints {
    std::string trigger;
    std::string output;
};
ProbePoints probe_points(const std::string& cell);

/// Measures trigger-to-output delay of a controller cell ("write_dro",
/// "recirc", "merger", "fanout", "read") inside the full memory at each bias.
std::vector<DelaySample> characterize_cell(const MemoryConfig& cfg, const std::string& cell,
                                           const std::vector<double>& biases);

struct Scenario {
    std::string name;
    MemoryProgram program;
};

/// Single write/read with repeated reads, overwrite with 0, and a sweep that
/// writes, reads and rewrites every address.
std::vector<Scenario> default_scenarios(int num_addresses);

struct MarginReport {
    double frequency_hz = 0.0;
    bool feasible = true;
    int lower_pct = 0;
    int upper_pct = 0;
    Limiter lower_limiter = Limiter::None;
    Limiter upper_limiter = Limiter::None;
    std::string note;

    int width() const { return lower_pct + upper_pct; }
};

struct MarginOptions {
    int max_pct = 50;
};

/// Steps bias down, then up, by 1% of nominal from 1.0. Throws
/// std::invalid_argument for an empty suite.
MarginReport bias_margin(const MemoryConfig& cfg, double frequency_hz, const std::vector<Scenario>& suite,
                         const MarginOptions& options = {});
MarginReport bias_margin(const MemoryConfig& cfg, double frequency_hz);

/// One report per frequency, sorted by frequency; frequencies whose nominal
/// STA fails are reported infeasible.
std::vector<MarginReport> margin_sweep(const MemoryConfig& cfg, const std::vector<double>& frequencies,
                                       const std::vector<Scenario>& suite = {}, const MarginOptions& options = {});

/// Columns: frequency_Hz,lower_pct,upper_pct,limiter
void write_margin_csv(const std::vector<MarginReport>& reports, std::ostream& out);
/// Columns: bias_ratio,delay_fs
void write_characterization_csv(const std::vector<DelaySample>& samples, std::ostream& out);
void write_sta_report(const StaReport& report, std::ostream& out);

} // namespace dlmem
