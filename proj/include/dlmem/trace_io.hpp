#pragma once

#include <ostream>
#include <string>

#include "dlmem/engine.hpp"

namespace dlmem {

/// Columns: time_fs,line,kind,detail. Pulse rows carry an empty detail;
/// violation rows put the cell name in the line column.
void write_trace_csv(const Trace& trace, std::ostream& out);

/// One-bit wire per observed line, toggled on every pulse; 1 fs timescale.
void write_trace_vcd(const Trace& trace, std::ostream& out);

/// Writes CSV or VCD depending on the file extension (.csv / .vcd).
void write_trace_file(const Trace& trace, const std::string& path);

} // namespace dlmem
