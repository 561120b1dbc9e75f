#include "dlmem/density.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "dlmem/types.hpp"

namespace dlmem {

using nlohmann::json;

namespace {

constexpr double nm = 1e-9;
constexpr double pH_per_um = 1e-12 / 1e-6;
constexpr double fF_per_um = 1e-15 / 1e-6;

struct Published {
    double factor;
    std::map<int, double> by_ghz; // single-stack layer count of the preset
};

const std::map<std::string, Published>& published_table() {
    static const std::map<std::string, Published> table{
        {"nb-250nm", {0.298, {{20, 0.2}, {50, 0.4}, {75, 0.7}, {100, 0.9}}}},
        {"nb-120nm", {0.296, {{20, 0.4}, {50, 0.9}, {75, 1.4}, {100, 1.9}}}},
        {"mon-microstrip-250nm", {0.047, {{20, 0.3}, {50, 0.7}, {75, 1.1}, {100, 1.4}}}},
        {"mon-microstrip-120nm", {0.034, {{20, 0.8}, {50, 2.0}, {75, 3.0}, {100, 4.0}}}},
        {"mon-stripline-120nm", {0.029, {{20, 3.2}, {50, 8.1}, {75, 12.1}, {100, 19.0}}}},
        {"nbtin-100nm", {0.011, {{20, 10.7}, {50, 26.6}, {75, 40.0}, {100, 53.3}}}},
        {"nbn-40nm", {0.011, {{20, 15.1}, {50, 37.7}, {75, 56.6}, {100, 75.4}}}},
        {"nbn-15nm", {0.007, {{20, 28.1}, {50, 70.1}, {75, 105.2}, {100, 140.3}}}},
    };
    return table;
}

// Hundred-layer NbN 15 nm stack.
const std::map<int, double>& published_stack() {
    static const std::map<int, double> stack{{20, 701.4}, {50, 1753.0}, {75, 2630.0}, {100, 3507.0}};
    return stack;
}

std::optional<int> whole_ghz(double frequency_hz) {
    const double g = frequency_hz / 1e9;
    if (std::abs(g - std::round(g)) > 1e-9) return std::nullopt;
    return static_cast<int>(std::lround(g));
}

} // namespace

void LineSpec::validate() const {
    if (!(linewidth_m > 0.0)) throw ConfigError(name + ".linewidth", "must be positive");
    if (!(spacing_m > 0.0)) throw ConfigError(name + ".spacing", "must be positive");
    if (!(inductance_h_per_m > 0.0)) throw ConfigError(name + ".inductance", "must be positive");
    if (!(capacitance_f_per_m > 0.0)) throw ConfigError(name + ".capacitance", "must be positive");
    if (layers < 1) throw ConfigError(name + ".layers", "must be at least 1");
}

double inductance_from_sheet(double sheet_h_per_square, double linewidth_m) {
    if (!(sheet_h_per_square > 0.0) || !(linewidth_m > 0.0))
        throw std::invalid_argument("sheet inductance and linewidth must be positive");
    return sheet_h_per_square / linewidth_m;
}

Velocity velocity(double inductance_h_per_m, double capacitance_f_per_m) {
    if (!(inductance_h_per_m > 0.0) || !(capacitance_f_per_m > 0.0))
        throw std::invalid_argument("inductance and capacitance must be positive");
    const double v = 1.0 / std::sqrt(inductance_h_per_m * capacitance_f_per_m);
    return {v, v / kSpeedOfLight};
}

double density(double frequency_hz, double pitch_m, double velocity_m_per_s) {
    return frequency_hz / (pitch_m * velocity_m_per_s);
}

double density_stacked(double frequency_hz, double pitch_m, double velocity_m_per_s, int layers) {
    if (layers < 1) throw std::invalid_argument("layer count must be at least 1");
    return density(frequency_hz, pitch_m, velocity_m_per_s) * layers;
}

std::vector<LineSpec> line_presets() {
    auto make = [](const char* name, const char* device, const char* process, const char* maturity, double w_nm,
                   double s_nm, double l_ph_um, double c_ff_um, int layers) {
        return LineSpec{name, device, process, maturity, w_nm * nm, s_nm * nm, l_ph_um * pH_per_um,
                        c_ff_um * fF_per_um, layers};
    };
    return {
        make("nb-250nm", "Nb stripline", "SFQ5ee", "Mature", 250, 250, 0.50, 0.25, 4),
        make("nb-120nm", "Nb stripline", "SC2", "Aggressive", 120, 120, 0.65, 0.19, 4),
        make("mon-microstrip-250nm", "MoN kinetic inductor microstrip", "SFQ5ee", "Mature", 250, 250, 32.0, 0.16, 1),
        make("mon-microstrip-120nm", "MoN kinetic inductor microstrip", "SC2", "Aggressive", 120, 120, 66.70, 0.14, 1),
        make("mon-stripline-120nm", "MoN kinetic inductor stripline", "SC2", "Aggressive", 120, 120, 66.70, 0.19, 4),
        make("nbtin-100nm", "NbTiN kinetic inductor stripline", "Not established", "Academic", 100, 120, 490.5, 0.17, 4),
        // Capacitance 0.044 fF/um: the table prints it rounded to 0.04.
        make("nbn-40nm", "NbN kinetic inductor nanowire", "Not established", "Academic", 40, 120, 2050.0, 0.044, 4),
        make("nbn-15nm", "NbN kinetic inductor nanowire", "Not established", "Academic", 15, 120, 5467.0, 0.04, 4),
    };
}

const LineSpec& find_preset(const std::vector<LineSpec>& presets, const std::string& name) {
    for (const auto& p : presets)
        if (p.name == name) return p;
    std::string names;
    for (const auto& p : presets) names += (names.empty() ? "" : ", ") + p.name;
    throw ConfigError("preset", "unknown preset '" + name + "' (valid: " + names + ")");
}

std::optional<double> published_density(const std::string& preset, double frequency_hz, int layers) {
    const auto ghz = whole_ghz(frequency_hz);
    if (!ghz) return std::nullopt;
    const auto& table = published_table();
    auto it = table.find(preset);
    if (it == table.end()) return std::nullopt;
    const auto& by = (preset == "nbn-15nm" && layers == 100) ? published_stack() : it->second.by_ghz;
    if (preset != "nbn-15nm" || layers != 100) {
        const auto presets = line_presets();
        if (find_preset(presets, preset).layers != layers) return std::nullopt;
    }
    auto row = by.find(*ghz);
    if (row == by.end()) return std::nullopt;
    return row->second;
}

std::optional<double> published_velocity_factor(const std::string& preset) {
    const auto& table = published_table();
    auto it = table.find(preset);
    if (it == table.end()) return std::nullopt;
    return it->second.factor;
}

std::optional<double> DensityRow::relative_error() const {
    if (!published_mbit_cm2) return std::nullopt;
    return (density_mbit_cm2() - *published_mbit_cm2) / *published_mbit_cm2;
}

DensityRow density_row(const LineSpec& spec, double frequency_hz) {
    spec.validate();
    DensityRow row;
    row.spec = spec;
    row.frequency_hz = frequency_hz;
    row.v = velocity(spec.inductance_h_per_m, spec.capacitance_f_per_m);
    row.density_bits_m2 = density_stacked(frequency_hz, spec.pitch(), row.v.meters_per_second, spec.layers);
    row.published_mbit_cm2 = published_density(spec.name, frequency_hz, spec.layers);
    row.published_factor = published_velocity_factor(spec.name);
    return row;
}

std::vector<DensityRow> reproduce_table(const std::vector<LineSpec>& presets, const std::vector<double>& frequencies,
                                        const std::vector<StackingRun>& stacking) {
    std::vector<DensityRow> rows;
    for (const auto& p : presets)
        for (double f : frequencies) rows.push_back(density_row(p, f));
    for (const auto& s : stacking) {
        LineSpec spec = find_preset(presets, s.preset);
        spec.layers = s.layers;
        for (double f : frequencies) rows.push_back(density_row(spec, f));
    }
    return rows;
}

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string opt(const char* pattern, const std::optional<double>& v) { return v ? fmt(pattern, *v) : ""; }

} // namespace

void write_density_csv(const std::vector<DensityRow>& rows, std::ostream& out) {
    out << "preset,device,frequency_GHz,layers,velocity_factor,published_velocity_factor,density_Mbit_cm2,"
           "published_Mbit_cm2,rel_error\n";
    for (const auto& r : rows) {
        out << r.spec.name << ',' << r.spec.device << ',' << fmt("%g", r.frequency_hz / 1e9) << ',' << r.spec.layers
            << ',' << fmt("%.5f", r.v.factor) << ',' << opt("%.3f", r.published_factor) << ','
            << fmt("%.4f", r.density_mbit_cm2()) << ',' << opt("%g", r.published_mbit_cm2) << ','
            << opt("%+.4f", r.relative_error()) << '\n';
    }
}

void write_density_table(const std::vector<DensityRow>& rows, std::ostream& out) {
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %6s %6s %9s %9s %12s %12s %9s\n", "preset", "GHz", "layers", "speed(c)",
                  "table(c)", "Mbit/cm2", "table", "error");
    out << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-22s %6g %6d %9.4f %9s %12.3f %12s %9s\n", r.spec.name.c_str(),
                      r.frequency_hz / 1e9, r.spec.layers, r.v.factor, opt("%.3f", r.published_factor).c_str(),
                      r.density_mbit_cm2(), opt("%g", r.published_mbit_cm2).c_str(),
                      opt("%+.1f%%", r.relative_error() ? std::optional<double>(*r.relative_error() * 100) : std::nullopt)
                          .c_str());
        out << line;
    }
}

json presets_to_json(const std::vector<LineSpec>& presets) {
    json out = json::array();
    for (const auto& p : presets)
        out.push_back({{"name", p.name},
                       {"device", p.device},
                       {"process", p.process},
                       {"maturity", p.maturity},
                       {"linewidth_nm", p.linewidth_m / nm},
                       {"spacing_nm", p.spacing_m / nm},
                       {"inductance_pH_per_um", p.inductance_h_per_m / pH_per_um},
                       {"capacitance_fF_per_um", p.capacitance_f_per_m / fF_per_um},
                       {"layers", p.layers}});
    return out;
}

std::vector<LineSpec> presets_from_json(const json& doc) {
    if (!doc.is_array()) throw ConfigError("presets", "expected a list of presets");
    std::vector<LineSpec> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& e = doc[i];
        const std::string field = "presets[" + std::to_string(i) + "]";
        try {
            LineSpec p;
            p.name = e.at("name").get<std::string>();
            p.device = e.value("device", "");
            p.process = e.value("process", "");
            p.maturity = e.value("maturity", "");
            p.linewidth_m = e.at("linewidth_nm").get<double>() * nm;
            p.spacing_m = e.at("spacing_nm").get<double>() * nm;
            p.inductance_h_per_m = e.at("inductance_pH_per_um").get<double>() * pH_per_um;
            p.capacitance_f_per_m = e.at("capacitance_fF_per_um").get<double>() * fF_per_um;
            p.layers = e.value("layers", 1);
            p.validate();
            out.push_back(std::move(p));
        } catch (const json::exception& ex) {
            throw ConfigError(field, ex.what());
        }
    }
    return out;
}

} // namespace dlmem
