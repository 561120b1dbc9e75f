#pragma once

// Storage density of a passive-transmission-line delay memory:
//   velocity = 1 / sqrt(L·C)
//   density  = f / (pitch · velocity) · layers        [bits/m²]
// with kinetic inductance per length = sheet inductance / linewidth.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace dlmem {

inline constexpr double kSpeedOfLight = 2.998e8; // m/s

/// bits/m² -> Mbit/cm²
inline constexpr double kMbitPerCm2 = 1e-10;

struct LineSpec {
    std::string name;
    std::string device;
    std::string process;
    std::string maturity;
    double linewidth_m = 0.0;
    double spacing_m = 0.0;
    double inductance_h_per_m = 0.0;
    double capacitance_f_per_m = 0.0;
    int layers = 1;

    double pitch() const { return linewidth_m + spacing_m; }
    void validate() const;
};

struct Velocity {
    double meters_per_second = 0.0;
    double factor = 0.0; // fraction of c
};

/// H/□ over linewidth, giving H/m.
double inductance_from_sheet(double sheet_h_per_square, double linewidth_m);
Velocity velocity(double inductance_h_per_m, double capacitance_f_per_m);
double density(double frequency_hz, double pitch_m, double velocity_m_per_s);
double density_stacked(double frequency_hz, double pitch_m, double velocity_m_per_s, int layers);

/// Eight line technologies with published density and speed figures.
std::vector<LineSpec> line_presets();
const LineSpec& find_preset(const std::vector<LineSpec>& presets, const std::string& name);

/// Published reference values, when the table lists the combination.
std::optional<double> published_density(const std::string& preset, double frequency_hz, int layers);
std::optional<double> published_velocity_factor(const std::string& preset);

struct DensityRow {
    LineSpec spec;
    double frequency_hz = 0.0;
    Velocity v;
    double density_bits_m2 = 0.0;
    std::optional<double> published_mbit_cm2;
    std::optional<double> published_factor;

    double density_mbit_cm2() const { return density_bits_m2 * kMbitPerCm2; }
    std::optional<double> relative_error() const;
};

DensityRow density_row(const LineSpec& spec, double frequency_hz);

struct StackingRun {
    std::string preset;
    int layers = 1;
};

/// Every (preset, frequency) row, then each stacking run at every frequency.
std::vector<DensityRow> reproduce_table(const std::vector<LineSpec>& presets,
                                        const std::vector<double>& frequencies = {20e9, 50e9, 75e9, 100e9},
                                        const std::vector<StackingRun>& stacking = {{"nbn-15nm", 100}});

void write_density_csv(const std::vector<DensityRow>& rows, std::ostream& out);
void write_density_table(const std::vector<DensityRow>& rows, std::ostream& out);

/// Document: [{"name", "device", "process", "maturity", "linewidth_nm", "spacing_nm",
///             "inductance_pH_per_um", "capacitance_fF_per_um", "layers"}, ...]
nlohmann::json presets_to_json(const std::vector<LineSpec>& presets);
std::vector<LineSpec> presets_from_json(const nlohmann::json& doc);

} // namespace dlmem
