#include "dlmem/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dlmem {

using nlohmann::json;

std::map<std::string, CellParams> SimConfig::default_cells() {
    return {
        {kWriteDro, CellParams::dro()},   {kRecirc, CellParams::dro2r()}, {kMerger, CellParams::merger()},
        {kFanout, CellParams::fanout()}, {kRead, CellParams::dro2r()},
    };
}

void SimConfig::validate() const {
    if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) throw ConfigError("frequency", "must be positive");
    if (num_addresses < 1) throw ConfigError("num_addresses", "must be at least 1");
    if (header_interval && header_interval->count() <= 0) throw ConfigError("header_interval", "must be positive");
    if (max_events == 0) throw ConfigError("max_events", "must be positive");
    if (interval_duration(frequency_hz).count() <= 0) throw ConfigError("frequency", "interval rounds to zero");
    const auto defaults = default_cells();
    for (const auto& [name, d] : defaults) {
        auto it = cells.find(name);
        if (it == cells.end()) throw ConfigError("cells." + name, "missing cell");
        if (it->second.kind != d.kind) throw ConfigError("cells." + name, "wrong cell kind");
        it->second.validate(name);
    }
    for (const auto& [name, p] : cells)
        if (!defaults.count(name)) throw ConfigError("cells." + name, "unknown cell name");
}

const CellParams& SimConfig::cell(const std::string& name) const {
    auto it = cells.find(name);
    if (it == cells.end()) throw ConfigError("cells." + name, "unknown cell name");
    return it->second;
}

namespace {

Femtoseconds duration_field(const json& v, const std::string& field) {
    if (!v.is_string()) throw ConfigError(field, "expected a duration string with unit suffix");
    try {
        return parse_duration(v.get<std::string>());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(field, e.what());
    }
}

double number_field(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    return v.get<double>();
}

std::optional<std::pair<double, double>> range_field(const json& cell, const std::string& field) {
    if (!cell.contains("range")) return std::nullopt;
    const auto& r = cell.at("range");
    if (!r.is_array() || r.size() != 2) throw ConfigError(field + ".range", "expected [lo, hi]");
    return std::pair{number_field(r[0], field + ".range"), number_field(r[1], field + ".range")};
}

std::vector<BiasKnot> points_field(const json& v, const std::string& field) {
    if (!v.is_array()) throw ConfigError(field, "expected a list of [ratio, delay] pairs");
    std::vector<BiasKnot> out;
    for (const auto& p : v) {
        if (!p.is_array() || p.size() != 2) throw ConfigError(field, "expected [ratio, delay]");
        out.push_back({number_field(p[0], field), duration_field(p[1], field)});
    }
    return out;
}

BiasDelayModel model_field(const json& cell, const std::string& field, const char* prop_key, const char* points_key,
                           Femtoseconds default_nominal) {
    const auto range = range_field(cell, field);
    try {
        if (cell.contains(points_key))
            return BiasDelayModel(points_field(cell.at(points_key), field + "." + points_key), range);
        const Femtoseconds nominal =
            cell.contains(prop_key) ? duration_field(cell.at(prop_key), field + "." + prop_key) : default_nominal;
        if (nominal.count() < 0) throw ConfigError(field + "." + prop_key, "must be non-negative");
        std::vector<std::pair<double, double>> curve{{0.7, 1.4}, {0.85, 1.15}, {1.0, 1.0}, {1.15, 0.9}, {1.3, 0.85}};
        if (cell.contains("curve")) {
            curve.clear();
            const auto& c = cell.at("curve");
            if (!c.is_array()) throw ConfigError(field + ".curve", "expected a list of [ratio, multiplier] pairs");
            for (const auto& p : c) {
                if (!p.is_array() || p.size() != 2) throw ConfigError(field + ".curve", "expected [ratio, multiplier]");
                curve.emplace_back(number_field(p[0], field + ".curve"), number_field(p[1], field + ".curve"));
            }
        }
        return BiasDelayModel::scaled(nominal, curve, range);
    } catch (const ConfigError& e) {
        if (e.field().rfind("cells.", 0) == 0) throw;
        throw ConfigError(field + "." + e.field(), e.what());
    }
}

CellParams cell_from_json(const std::string& name, const json& v, const CellParams& base) {
    const std::string field = "cells." + name;
    if (!v.is_object()) throw ConfigError(field, "expected an object");
    static const std::set<std::string> known{"prop",  "prop1", "setup",  "hold",   "min_separation",
                                             "curve", "range", "points", "points1"};
    for (const auto& [key, _] : v.items())
        if (!known.count(key)) throw ConfigError(field + "." + key, "unknown field");
    CellParams p = base;
    p.delay = model_field(v, field, "prop", "points", base.delay.nominal());
    if (p.kind == CellKind::Dro2r) p.delay_alt = model_field(v, field, "prop1", "points1", base.delay_alt.nominal());
    if (v.contains("setup")) p.setup = duration_field(v.at("setup"), field + ".setup");
    if (v.contains("hold")) p.hold = duration_field(v.at("hold"), field + ".hold");
    if (v.contains("min_separation")) p.min_separation = duration_field(v.at("min_separation"), field + ".min_separation");
    p.validate(name);
    return p;
}

json points_to_json(const BiasDelayModel& m) {
    json out = json::array();
    for (const auto& k : m.knots()) out.push_back(json::array({k.ratio, format_duration(k.delay)}));
    return out;
}

} // namespace

SimConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("document", "expected a JSON object");
    static const std::set<std::string> known{"frequency", "num_addresses", "bias",  "header_interval",
                                             "loop_jitter", "max_events",  "cells", "memory"};
    for (const auto& [key, _] : doc.items())
        if (!known.count(key)) throw ConfigError(key, "unknown field");

    SimConfig cfg;
    if (!doc.contains("frequency")) throw ConfigError("frequency", "missing required field");
    const auto& f = doc.at("frequency");
    if (f.is_string()) {
        try {
            cfg.frequency_hz = parse_frequency(f.get<std::string>());
        } catch (const Error& e) {
            throw ConfigError("frequency", e.what());
        }
    } else {
        cfg.frequency_hz = number_field(f, "frequency");
    }
    if (!doc.contains("num_addresses")) throw ConfigError("num_addresses", "missing required field");
    const auto& n = doc.at("num_addresses");
    if (!n.is_number_integer()) throw ConfigError("num_addresses", "expected an integer");
    const auto nv = n.get<std::int64_t>();
    if (nv < 1 || nv > 1'000'000) throw ConfigError("num_addresses", "must be in [1, 1000000]");
    cfg.num_addresses = static_cast<int>(nv);

    if (doc.contains("bias")) {
        const double b = number_field(doc.at("bias"), "bias");
        if (!(b > 0.0)) throw ConfigError("bias", "must be positive");
        cfg.bias = BiasPoint{b};
    }
    if (doc.contains("header_interval"))
        cfg.header_interval = duration_field(doc.at("header_interval"), "header_interval");
    if (doc.contains("loop_jitter")) {
        const auto& j = doc.at("loop_jitter");
        if (!j.is_array()) throw ConfigError("loop_jitter", "expected a list of durations");
        for (const auto& e : j) cfg.loop_jitter.push_back(duration_field(e, "loop_jitter"));
    }
    if (doc.contains("max_events")) {
        const auto& m = doc.at("max_events");
        if (!m.is_number_unsigned()) throw ConfigError("max_events", "expected a positive integer");
        cfg.max_events = m.get<std::uint64_t>();
    }
    if (doc.contains("cells")) {
        const auto& c = doc.at("cells");
        if (!c.is_object()) throw ConfigError("cells", "expected an object");
        for (const auto& [name, v] : c.items()) {
            auto it = cfg.cells.find(name);
            if (it == cfg.cells.end()) throw ConfigError("cells." + name, "unknown cell name");
            it->second = cell_from_json(name, v, it->second);
        }
    }
    cfg.validate();
    return cfg;
}

SimConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("document", e.what());
    }
    return config_from_json(doc);
}

json config_to_json(const SimConfig& cfg) {
    json doc;
    doc["frequency"] = cfg.frequency_hz;
    doc["num_addresses"] = cfg.num_addresses;
    doc["bias"] = cfg.bias.ratio;
    if (cfg.header_interval) doc["header_interval"] = format_duration(*cfg.header_interval);
    json jitter = json::array();
    for (auto j : cfg.loop_jitter) jitter.push_back(format_duration(j));
    doc["loop_jitter"] = jitter;
    doc["max_events"] = cfg.max_events;
    json cells = json::object();
    for (const auto& [name, p] : cfg.cells) {
        json c;
        c["setup"] = format_duration(p.setup);
        c["hold"] = format_duration(p.hold);
        c["min_separation"] = format_duration(p.min_separation);
        if (!p.delay.ideal()) {
            c["points"] = points_to_json(p.delay);
            c["range"] = json::array({p.delay.lo(), p.delay.hi()});
        }
        if (p.kind == CellKind::Dro2r && !p.delay_alt.ideal()) {
            c["points1"] = points_to_json(p.delay_alt);
            if (p.delay_alt.lo() != p.delay.lo() || p.delay_alt.hi() != p.delay.hi())
                throw ConfigError("cells." + name + ".range", "both DRO2R ports must share one operating range");
        }
        cells[name] = c;
    }
    doc["cells"] = cells;
    return doc;
}

std::string serialize_config(const SimConfig& cfg) { return config_to_json(cfg).dump(2); }

Femtoseconds interval_duration(double frequency_hz) {
    return Femtoseconds{static_cast<std::int64_t>(std::floor(1e15 / frequency_hz + 0.5))};
}

Femtoseconds interval_duration(const SimConfig& cfg) { return interval_duration(cfg.frequency_hz); }

Femtoseconds header_duration(const SimConfig& cfg) { return cfg.header_interval.value_or(interval_duration(cfg)); }

Femtoseconds trip_duration(const SimConfig& cfg) {
    return header_duration(cfg) + interval_duration(cfg) * cfg.num_addresses;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("path", "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace dlmem
