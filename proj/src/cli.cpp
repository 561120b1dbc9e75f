#include "dlmem/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlmem/density.hpp"
#include "dlmem/memory.hpp"
#include "dlmem/timing.hpp"
#include "dlmem/trace_io.hpp"

namespace dlmem {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_frequencies(const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split_list(text)) {
        try {
            out.push_back(parse_frequency(s));
        } catch (const Error& e) {
            throw ConfigError("freqs", e.what());
        }
        if (!(out.back() > 0.0)) throw ConfigError("freqs", "frequencies must be positive");
    }
    if (out.empty()) throw ConfigError("freqs", "no frequencies given");
    return out;
}

std::vector<double> parse_biases(const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split_list(text)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || !(v > 0.0)) throw ConfigError("biases", "malformed bias ratio '" + s + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("biases", "no bias ratios given");
    return out;
}

// Writes to path, or to out when path is empty or "-".
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("out", "cannot write '" + path + "'");
    fn(file);
}

struct Options {
    std::string config;
    std::string program;
    std::string trace;
    std::optional<double> bias;
    std::string freqs;
    std::string freq;
    std::string out;
    std::string preset;
    bool all = false;
    std::optional<int> layers;
    std::string format = "table";
    std::string cell;
    std::string biases = "0.7,0.75,0.8,0.85,0.9,0.95,1.0,1.05,1.1,1.15,1.2,1.25,1.3";
    std::optional<double> r_lo;
    std::optional<double> r_hi;
};

int cmd_simulate(const Options& o, std::ostream& out) {
    const auto cfg = parse_memory_config(read_text_file(o.config));
    const auto program = parse_program(read_text_file(o.program));
    program.validate(cfg.base.num_addresses);
    if (o.bias && !(*o.bias > 0.0)) throw ConfigError("bias", "must be positive");
    const auto result = run_program(program, cfg, o.bias ? std::optional<BiasPoint>(BiasPoint{*o.bias}) : std::nullopt);
    if (!o.trace.empty()) write_trace_file(result.trace, o.trace);
    auto summary = result_to_json(result);
    summary["frequency_Hz"] = cfg.base.frequency_hz;
    summary["bias"] = o.bias.value_or(cfg.base.bias.ratio);
    summary["oracle_match"] = result.reads == oracle(program, cfg.base.num_addresses);
    out << summary.dump(2) << '\n';
    return result.pass ? kExitOk : kExitRunFailed;
}

int cmd_sta(const Options& o, std::ostream& out) {
    const auto cfg = parse_memory_config(read_text_file(o.config));
    const double f = o.freq.empty() ? cfg.base.frequency_hz : parse_frequencies(o.freq).front();
    const double lo = o.r_lo.value_or(1.0);
    const double hi = o.r_hi.value_or(1.0);
    const auto report = sta(cfg, f, lo, hi);
    write_sta_report(report, out);
    out << "max_frequency_Hz " << std::llround(max_frequency(cfg)) << '\n';
    return report.worst_slack().count() >= 0 ? kExitOk : kExitRunFailed;
}

int cmd_margins(const Options& o, std::ostream& out) {
    const auto cfg = parse_memory_config(read_text_file(o.config));
    const auto freqs = parse_frequencies(o.freqs);
    const auto reports = margin_sweep(cfg, freqs);
    emit(o.out, out, [&](std::ostream& s) { write_margin_csv(reports, s); });
    return kExitOk;
}

int cmd_density(const Options& o, std::ostream& out) {
    if (o.all == !o.preset.empty()) throw ConfigError("preset", "give exactly one of --preset or --all");
    if (o.format != "csv" && o.format != "table") throw ConfigError("out", "output format must be csv or table");
    if (o.layers && *o.layers < 1) throw ConfigError("layers", "must be at least 1");
    const auto presets = line_presets();
    const auto freqs = o.freqs.empty() ? std::vector<double>{20e9, 50e9, 75e9, 100e9} : parse_frequencies(o.freqs);
    std::vector<DensityRow> rows;
    if (o.all) {
        if (o.layers) {
            auto specs = presets;
            for (auto& s : specs) s.layers = *o.layers;
            rows = reproduce_table(specs, freqs, {});
        } else {
            rows = reproduce_table(presets, freqs);
        }
    } else {
        LineSpec spec = find_preset(presets, o.preset);
        if (o.layers) spec.layers = *o.layers;
        for (double f : freqs) rows.push_back(density_row(spec, f));
    }
    if (o.format == "csv") write_density_csv(rows, out);
    else write_density_table(rows, out);
    return kExitOk;
}

int cmd_characterize(const Options& o, std::ostream& out) {
    const auto cfg = parse_memory_config(read_text_file(o.config));
    const auto samples = characterize_cell(cfg, o.cell, parse_biases(o.biases));
    emit(o.out, out, [&](std::ostream& s) { write_characterization_csv(samples, s); });
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pulse-level simulator and analysis tools for a superconducting delay-line memory", "dlmem"};
    app.require_subcommand(1, 1);
    Options o;

    auto* simulate = app.add_subcommand("simulate", "Run a memory program and report reads");
    simulate->add_option("--config", o.config, "Configuration document")->required();
    simulate->add_option("--program", o.program, "Program document")->required();
    simulate->add_option("--trace", o.trace, "Trace output (.csv or .vcd)");
    simulate->add_option("--bias", o.bias, "Bias ratio (1.0 = nominal)");

    auto* sta_cmd = app.add_subcommand("sta", "Static timing report");
    sta_cmd->add_option("--config", o.config, "Configuration document")->required();
    sta_cmd->add_option("--freq", o.freq, "Frequency (default: from config)");
    sta_cmd->add_option("--lo", o.r_lo, "Lowest bias ratio");
    sta_cmd->add_option("--hi", o.r_hi, "Highest bias ratio");

    auto* margins = app.add_subcommand("margins", "Bias margin sweep over frequencies");
    margins->add_option("--config", o.config, "Configuration document")->required();
    margins->add_option("--freqs", o.freqs, "Comma-separated frequencies, e.g. 20GHz,100GHz")->required();
    margins->add_option("--out", o.out, "CSV output path (default: stdout)");

    auto* dens = app.add_subcommand("density", "Storage density report");
    dens->add_option("--preset", o.preset, "Line preset name");
    dens->add_flag("--all", o.all, "All presets plus the stacking rows");
    dens->add_option("--freqs", o.freqs, "Comma-separated frequencies (default 20,50,75,100 GHz)");
    dens->add_option("--layers", o.layers, "Override layer count");
    dens->add_option("--out", o.format, "Output format: csv or table");

    auto* chr = app.add_subcommand("characterize", "Measure a cell's delay versus bias in place");
    chr->add_option("--config", o.config, "Configuration document")->required();
    chr->add_option("--cell", o.cell, "write_dro, recirc, merger, fanout or read")->required();
    chr->add_option("--biases", o.biases, "Comma-separated bias ratios");
    chr->add_option("--out", o.out, "CSV output path (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(o, out);
        if (sta_cmd->parsed()) return cmd_sta(o, out);
        if (margins->parsed()) return cmd_margins(o, out);
        if (dens->parsed()) return cmd_density(o, out);
        if (chr->parsed()) return cmd_characterize(o, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const ElectricalRangeError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "run failed: " << e.what() << '\n';
        return kExitRunFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

} // namespace dlmem
