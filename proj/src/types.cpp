#include "dlmem/types.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace dlmem {

BiasPoint::BiasPoint(double r) : ratio(r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("bias", "bias ratio must be positive");
}

ConfigError::ConfigError(std::string field, const std::string& message)
    : Error(field + ": " + message), field_(std::move(field)) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits "12.5ps" into (12.5, "ps"). Returns false when the number part is malformed.
bool split_number(std::string_view text, double& value, std::string& unit) {
    text = trim(text);
    std::string buf(text);
    const char* begin = buf.c_str();
    char* end = nullptr;
    value = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(value)) return false;
    unit = std::string(trim(std::string_view(end)));
    return true;
}

} // namespace

Femtoseconds parse_duration(std::string_view text) {
    double value = 0.0;
    std::string unit;
    if (!split_number(text, value, unit)) throw Error("malformed duration '" + std::string(text) + "'");
    double scale = 0.0;
    if (unit == "fs") scale = 1.0;
    else if (unit == "ps") scale = 1e3;
    else if (unit == "ns") scale = 1e6;
    else if (unit == "us") scale = 1e9;
    else throw Error("duration '" + std::string(text) + "' needs a unit suffix (fs, ps, ns, us)");
    return Femtoseconds{static_cast<std::int64_t>(std::llround(value * scale))};
}

double parse_frequency(std::string_view text) {
    double value = 0.0;
    std::string unit;
    if (!split_number(text, value, unit)) throw Error("malformed frequency '" + std::string(text) + "'");
    double scale = 0.0;
    if (unit.empty() || unit == "Hz") scale = 1.0;
    else if (unit == "kHz") scale = 1e3;
    else if (unit == "MHz") scale = 1e6;
    else if (unit == "GHz") scale = 1e9;
    else if (unit == "THz") scale = 1e12;
    else throw Error("unknown frequency unit in '" + std::string(text) + "'");
    return value * scale;
}

std::string format_duration(Femtoseconds d) { return std::to_string(d.count()) + "fs"; }

std::string format_ps(Femtoseconds d) {
    const auto v = d.count();
    std::ostringstream os;
    if (v < 0) os << '-';
    const auto a = v < 0 ? -v : v;
    os << a / 1000;
    if (auto frac = a % 1000; frac != 0) {
        std::string f = std::to_string(frac);
        f.insert(0, 3 - f.size(), '0');
        while (f.back() == '0') f.pop_back();
        os << '.' << f;
    }
    os << "ps";
    return os.str();
}

} // namespace dlmem
