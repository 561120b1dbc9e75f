#pragma once

// Behavioral pulse-level models of the controller cells. Each step function is
// pure: it takes the current state and one input pulse and returns the next
// state, the pulses to emit and any timing violations observed.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dlmem/types.hpp"

namespace dlmem {

enum class CellKind { Dro, Dro2r, Merger, Fanout, Sink };
enum class ViolationKind { Setup, Hold, Electrical };

std::string_view to_string(CellKind kind);
std::string_view to_string(ViolationKind kind);
CellKind cell_kind_from_string(std::string_view text);

struct TimingViolation {
    std::string cell;
    ViolationKind kind = ViolationKind::Electrical;
    TimeStamp time{0};
    std::string detail;

    friend bool operator==(const TimingViolation&, const TimingViolation&) = default;
};

struct BiasKnot {
    double ratio = 1.0;
    Femtoseconds delay{0};

    friend bool operator==(const BiasKnot&, const BiasKnot&) = default;
};

/// Piecewise-linear delay versus bias. A default-constructed model is an ideal
/// zero-delay element that accepts any bias.
class BiasDelayModel {
public:
    BiasDelayModel() = default;
    BiasDelayModel(std::vector<BiasKnot> knots, std::optional<std::pair<double, double>> range = std::nullopt);

    /// Knots at nominal × multiplier for each (ratio, multiplier) pair.
    static BiasDelayModel scaled(Femtoseconds nominal, const std::vector<std::pair<double, double>>& multipliers,
                                 std::optional<std::pair<double, double>> range = std::nullopt);
    /// Default convex curve: {0.7, 0.85, 1.0, 1.15, 1.3} -> {1.4, 1.15, 1.0, 0.9, 0.85} × nominal.
    static BiasDelayModel default_for(Femtoseconds nominal);

    bool ideal() const noexcept { return knots_.empty(); }
    bool in_range(BiasPoint bias) const noexcept;
    /// Interpolated delay, rounded half up to the femtosecond. Throws ElectricalRangeError outside [lo, hi].
    Femtoseconds at(BiasPoint bias) const;
    Femtoseconds nominal() const { return at(BiasPoint{1.0}); }

    const std::vector<BiasKnot>& knots() const noexcept { return knots_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    friend bool operator==(const BiasDelayModel&, const BiasDelayModel&) = default;

private:
    std::vector<BiasKnot> knots_;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

Femtoseconds delay_at_bias(const BiasDelayModel& model, BiasPoint bias);

struct CellParams {
    CellKind kind = CellKind::Sink;
    BiasDelayModel delay;     // out, out0 or both fan-out branches
    BiasDelayModel delay_alt; // DRO2R out1
    Femtoseconds setup{0};
    Femtoseconds hold{0};
    Femtoseconds min_separation{2000}; // merger collision threshold

    Femtoseconds prop_nominal() const { return delay.nominal(); }
    bool in_range(BiasPoint bias) const noexcept;
    void validate(const std::string& name) const;

    static CellParams dro();
    static CellParams dro2r();
    static CellParams merger();
    static CellParams fanout();
    static CellParams sink();
    static CellParams defaults(CellKind kind);

    friend bool operator==(const CellParams&, const CellParams&) = default;
};

struct CellState {
    bool stored = false;
    std::optional<TimeStamp> last_data;
    std::optional<TimeStamp> last_clock;
    std::array<std::optional<TimeStamp>, 2> last_in{};
    std::uint64_t received = 0; // data pulses
    std::uint64_t emitted = 0;
    std::uint64_t ignored = 0;

    friend bool operator==(const CellState&, const CellState&) = default;
};

/// Input port numbering, shared with the engine's per-kind port lists.
enum class DroInput { Data = 0, Clock = 1 };
enum class Dro2rInput { Data = 0, Clock0 = 1, Clock1 = 2 };
enum class MergerInput { In0 = 0, In1 = 1 };

struct Emission {
    int port = 0;
    TimeStamp time{0};

    friend bool operator==(const Emission&, const Emission&) = default;
};

struct StepResult {
    CellState state;
    std::vector<Emission> emitted;
    std::vector<TimingViolation> violations;
};

StepResult dro_step(const CellParams& p, const CellState& s, DroInput in, TimeStamp t, BiasPoint bias,
                    std::string_view name = "dro");
StepResult dro2r_step(const CellParams& p, const CellState& s, Dro2rInput in, TimeStamp t, BiasPoint bias,
                      std::string_view name = "dro2r");
StepResult merger_step(const CellParams& p, const CellState& s, MergerInput in, TimeStamp t, BiasPoint bias,
                       std::string_view name = "merger");
StepResult fanout_step(const CellParams& p, const CellState& s, TimeStamp t, BiasPoint bias,
                       std::string_view name = "fanout");
StepResult sink_step(const CellParams& p, const CellState& s, TimeStamp t);

/// Dispatches on p.kind; port is the input index in the kind's port order.
StepResult step_cell(const CellParams& p, const CellState& s, int port, TimeStamp t, BiasPoint bias,
                     std::string_view name);

/// Number of input/output ports per kind.
int input_count(CellKind kind);
int output_count(CellKind kind);

} // namespace dlmem
