#include "dlmem/trace_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

namespace dlmem {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// Short printable identifier codes: '!' .. '~', then two characters, ...
std::string vcd_id(std::size_t n) {
    std::string id;
    do {
        id += static_cast<char>('!' + n % 94);
        n /= 94;
    } while (n != 0);
    return id;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

void write_trace_csv(const Trace& trace, std::ostream& out) {
    struct Row {
        std::int64_t time;
        int kind; // 0 pulse, 1 violation
        std::string line;
        std::string detail;
    };
    std::vector<Row> rows;
    rows.reserve(trace.events.size() + trace.violations.size());
    for (const auto& e : trace.events) rows.push_back({e.time.count(), 0, e.line, {}});
    for (const auto& v : trace.violations)
        rows.push_back({v.time.count(), 1, v.cell, std::string(to_string(v.kind)) + ": " + v.detail});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.time, a.kind, a.line) < std::tie(b.time, b.kind, b.line);
    });
    out << "time_fs,line,kind,detail\n";
    for (const auto& r : rows)
        out << r.time << ',' << csv_field(r.line) << ',' << (r.kind == 0 ? "pulse" : "violation") << ','
            << csv_field(r.detail) << '\n';
}

void write_trace_vcd(const Trace& trace, std::ostream& out) {
    std::map<std::string, std::string> ids;
    for (std::size_t i = 0; i < trace.lines.size(); ++i) ids[trace.lines[i]] = vcd_id(i);

    out << "$version dlmem $end\n";
    out << "$timescale 1fs $end\n";
    out << "$scope module memory $end\n";
    for (const auto& l : trace.lines) out << "$var wire 1 " << ids[l] << ' ' << l << " $end\n";
    out << "$upscope $end\n";
    out << "$enddefinitions $end\n";
    out << "#0\n$dumpvars\n";
    for (const auto& l : trace.lines) out << '0' << ids[l] << '\n';
    out << "$end\n";

    std::map<std::string, bool> level;
    std::int64_t current = -1;
    for (const auto& e : trace.events) {
        auto id = ids.find(e.line);
        if (id == ids.end()) continue;
        if (e.time.count() != current) {
            current = e.time.count();
            if (current != 0) out << '#' << current << '\n';
        }
        bool& v = level[e.line];
        v = !v;
        out << (v ? '1' : '0') << id->second << '\n';
    }
}

void write_trace_file(const Trace& trace, const std::string& path) {
    const bool vcd = ends_with(path, ".vcd");
    if (!vcd && !ends_with(path, ".csv")) throw ConfigError("trace", "trace file must end in .csv or .vcd: '" + path + "'");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("trace", "cannot write trace file '" + path + "'");
    if (vcd) write_trace_vcd(trace, out);
    else write_trace_csv(trace, out);
}

} // namespace dlmem
