#include "dlmem/cells.hpp"

#include <algorithm>
#include <cmath>

namespace dlmem {

using namespace literals;

std::string_view to_string(CellKind kind) {
    switch (kind) {
    case CellKind::Dro: return "DRO";
    case CellKind::Dro2r: return "DRO2R";
    case CellKind::Merger: return "MERGER";
    case CellKind::Fanout: return "FANOUT";
    case CellKind::Sink: return "SINK";
    }
    return "?";
}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::Setup: return "SETUP";
    case ViolationKind::Hold: return "HOLD";
    case ViolationKind::Electrical: return "ELECTRICAL";
    }
    return "?";
}

CellKind cell_kind_from_string(std::string_view text) {
    for (auto k : {CellKind::Dro, CellKind::Dro2r, CellKind::Merger, CellKind::Fanout, CellKind::Sink})
        if (to_string(k) == text) return k;
    throw Error("unknown cell kind '" + std::string(text) + "'");
}

BiasDelayModel::BiasDelayModel(std::vector<BiasKnot> knots, std::optional<std::pair<double, double>> range)
    : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw ConfigError("points", "a delay model needs at least two knots");
    bool all_zero = true;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const auto& k = knots_[i];
        if (!(k.ratio > 0.0) || !std::isfinite(k.ratio)) throw ConfigError("points", "bias ratios must be positive");
        if (k.delay.count() < 0) throw ConfigError("points", "delays must be non-negative");
        if (k.delay.count() != 0) all_zero = false;
        if (i == 0) continue;
        const auto& prev = knots_[i - 1];
        if (!(k.ratio > prev.ratio)) throw ConfigError("points", "bias ratios must be strictly increasing");
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        const auto& k = knots_[i];
        const auto& prev = knots_[i - 1];
        // A zero-delay element is flat; everything else must speed up with bias.
        if (all_zero ? k.delay > prev.delay : k.delay >= prev.delay)
            throw ConfigError("points", "delays must decrease as bias increases");
    }
    lo_ = range ? range->first : knots_.front().ratio;
    hi_ = range ? range->second : knots_.back().ratio;
    if (!(lo_ < 1.0 && 1.0 < hi_)) throw ConfigError("range", "operating range must straddle nominal bias");
    if (lo_ < knots_.front().ratio || hi_ > knots_.back().ratio)
        throw ConfigError("range", "operating range must lie within the knot span");
}

BiasDelayModel BiasDelayModel::scaled(Femtoseconds nominal, const std::vector<std::pair<double, double>>& multipliers,
                                      std::optional<std::pair<double, double>> range) {
    std::vector<BiasKnot> knots;
    knots.reserve(multipliers.size());
    for (const auto& [ratio, m] : multipliers) {
        const double d = static_cast<double>(nominal.count()) * m;
        knots.push_back({ratio, Femtoseconds{static_cast<std::int64_t>(std::floor(d + 0.5))}});
    }
    return BiasDelayModel(std::move(knots), range);
}

BiasDelayModel BiasDelayModel::default_for(Femtoseconds nominal) {
    static const std::vector<std::pair<double, double>> curve{
        {0.7, 1.4}, {0.85, 1.15}, {1.0, 1.0}, {1.15, 0.9}, {1.3, 0.85}};
    return scaled(nominal, curve);
}

bool BiasDelayModel::in_range(BiasPoint bias) const noexcept {
    return ideal() || (bias.ratio >= lo_ && bias.ratio <= hi_);
}

Femtoseconds BiasDelayModel::at(BiasPoint bias) const {
    if (ideal()) return Femtoseconds{0};
    if (!in_range(bias))
        throw ElectricalRangeError("bias " + std::to_string(bias.ratio) + " outside operating range [" +
                                   std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
    const double r = bias.ratio;
    auto hi = std::lower_bound(knots_.begin(), knots_.end(), r,
                               [](const BiasKnot& k, double v) { return k.ratio < v; });
    if (hi != knots_.end() && hi->ratio == r) return hi->delay;
    auto lo = std::prev(hi);
    const double frac = (r - lo->ratio) / (hi->ratio - lo->ratio);
    const double d = static_cast<double>(lo->delay.count()) +
                     static_cast<double>((hi->delay - lo->delay).count()) * frac;
    return Femtoseconds{static_cast<std::int64_t>(std::floor(d + 0.5))};
}

Femtoseconds delay_at_bias(const BiasDelayModel& model, BiasPoint bias) { return model.at(bias); }

bool CellParams::in_range(BiasPoint bias) const noexcept {
    return delay.in_range(bias) && delay_alt.in_range(bias);
}

void CellParams::validate(const std::string& name) const {
    if (setup.count() < 0) throw ConfigError("cells." + name + ".setup", "must be non-negative");
    if (hold.count() < 0) throw ConfigError("cells." + name + ".hold", "must be non-negative");
    if (min_separation.count() < 0) throw ConfigError("cells." + name + ".min_separation", "must be non-negative");
}

CellParams CellParams::dro() {
    CellParams p;
    p.kind = CellKind::Dro;
    p.delay = BiasDelayModel::default_for(5_ps);
    p.setup = 4_ps;
    p.hold = 1_ps;
    return p;
}

CellParams CellParams::dro2r() {
    CellParams p;
    p.kind = CellKind::Dro2r;
    p.delay = BiasDelayModel::default_for(6_ps);
    p.delay_alt = BiasDelayModel::default_for(6_ps);
    p.setup = 4_ps;
    p.hold = 1_ps;
    return p;
}

CellParams CellParams::merger() {
    CellParams p;
    p.kind = CellKind::Merger;
    p.delay = BiasDelayModel::default_for(3_ps);
    p.hold = 1_ps;
    return p;
}

CellParams CellParams::fanout() {
    CellParams p;
    p.kind = CellKind::Fanout;
    p.delay = BiasDelayModel::default_for(1_ps);
    p.hold = 1_ps;
    return p;
}

CellParams CellParams::sink() {
    CellParams p;
    p.kind = CellKind::Sink;
    return p;
}

CellParams CellParams::defaults(CellKind kind) {
    switch (kind) {
    case CellKind::Dro: return dro();
    case CellKind::Dro2r: return dro2r();
    case CellKind::Merger: return merger();
    case CellKind::Fanout: return fanout();
    case CellKind::Sink: return sink();
    }
    return sink();
}

int input_count(CellKind kind) {
    switch (kind) {
    case CellKind::Dro: return 2;
    case CellKind::Dro2r: return 3;
    case CellKind::Merger: return 2;
    case CellKind::Fanout: return 1;
    case CellKind::Sink: return 1;
    }
    return 0;
}

int output_count(CellKind kind) {
    switch (kind) {
    case CellKind::Dro: return 1;
    case CellKind::Dro2r: return 2;
    case CellKind::Merger: return 1;
    case CellKind::Fanout: return 2;
    case CellKind::Sink: return 0;
    }
    return 0;
}

namespace {

TimeStamp emit_time(TimeStamp t, Femtoseconds d) { return t + std::max(d, Femtoseconds{1}); }

std::string gap_detail(std::string_view what, Femtoseconds gap, Femtoseconds need) {
    return std::string(what) + " " + format_ps(gap) + " < " + format_ps(need);
}

bool out_of_range(const CellParams& p, BiasPoint bias, TimeStamp t, std::string_view name, StepResult& r) {
    if (p.in_range(bias)) return false;
    r.violations.push_back({std::string(name), ViolationKind::Electrical, t,
                            "bias " + std::to_string(bias.ratio) + " outside operating range"});
    return true;
}

void record_data(const CellParams& p, CellState& s, TimeStamp t, std::string_view name, StepResult& r) {
    if (s.last_clock && t - *s.last_clock < p.hold)
        r.violations.push_back({std::string(name), ViolationKind::Hold, t,
                                gap_detail("data after clock", t - *s.last_clock, p.hold)});
    s.last_data = t;
    ++s.received;
    if (s.stored) ++s.ignored;
    else s.stored = true;
}

void record_clock(const CellParams& p, CellState& s, TimeStamp t, std::string_view name, StepResult& r) {
    if (s.last_data && t - *s.last_data < p.setup)
        r.violations.push_back({std::string(name), ViolationKind::Setup, t,
                                gap_detail("clock after data", t - *s.last_data, p.setup)});
    s.last_clock = t;
}

} // namespace

StepResult dro_step(const CellParams& p, const CellState& s, DroInput in, TimeStamp t, BiasPoint bias,
                    std::string_view name) {
    StepResult r{s, {}, {}};
    if (out_of_range(p, bias, t, name, r)) return r;
    if (in == DroInput::Data) {
        record_data(p, r.state, t, name, r);
        return r;
    }
    record_clock(p, r.state, t, name, r);
    if (r.state.stored) {
        r.state.stored = false;
        ++r.state.emitted;
        r.emitted.push_back({0, emit_time(t, p.delay.at(bias))});
    }
    return r;
}

StepResult dro2r_step(const CellParams& p, const CellState& s, Dro2rInput in, TimeStamp t, BiasPoint bias,
                      std::string_view name) {
    StepResult r{s, {}, {}};
    if (out_of_range(p, bias, t, name, r)) return r;
    if (in == Dro2rInput::Data) {
        record_data(p, r.state, t, name, r);
        return r;
    }
    record_clock(p, r.state, t, name, r);
    if (r.state.stored) {
        r.state.stored = false;
        ++r.state.emitted;
        if (in == Dro2rInput::Clock0) r.emitted.push_back({0, emit_time(t, p.delay.at(bias))});
        else r.emitted.push_back({1, emit_time(t, p.delay_alt.at(bias))});
    }
    return r;
}

StepResult merger_step(const CellParams& p, const CellState& s, MergerInput in, TimeStamp t, BiasPoint bias,
                       std::string_view name) {
    StepResult r{s, {}, {}};
    if (out_of_range(p, bias, t, name, r)) return r;
    const int self = static_cast<int>(in);
    const auto& other = r.state.last_in[1 - self];
    if (other && t - *other < p.min_separation)
        r.violations.push_back({std::string(name), ViolationKind::Electrical, t,
                                "collision: " + gap_detail("input separation", t - *other, p.min_separation)});
    r.state.last_in[self] = t;
    ++r.state.received;
    ++r.state.emitted;
    r.emitted.push_back({0, emit_time(t, p.delay.at(bias))});
    return r;
}

StepResult fanout_step(const CellParams& p, const CellState& s, TimeStamp t, BiasPoint bias, std::string_view name) {
    StepResult r{s, {}, {}};
    if (out_of_range(p, bias, t, name, r)) return r;
    const auto at = emit_time(t, p.delay.at(bias));
    ++r.state.received;
    r.state.emitted += 2;
    r.emitted.push_back({0, at});
    r.emitted.push_back({1, at});
    return r;
}

StepResult sink_step(const CellParams&, const CellState& s, TimeStamp) {
    StepResult r{s, {}, {}};
    ++r.state.received;
    return r;
}

StepResult step_cell(const CellParams& p, const CellState& s, int port, TimeStamp t, BiasPoint bias,
                     std::string_view name) {
    switch (p.kind) {
    case CellKind::Dro: return dro_step(p, s, static_cast<DroInput>(port), t, bias, name);
    case CellKind::Dro2r: return dro2r_step(p, s, static_cast<Dro2rInput>(port), t, bias, name);
    case CellKind::Merger: return merger_step(p, s, static_cast<MergerInput>(port), t, bias, name);
    case CellKind::Fanout: return fanout_step(p, s, t, bias, name);
    case CellKind::Sink: return sink_step(p, s, t);
    }
    return StepResult{s, {}, {}};
}

} // namespace dlmem
