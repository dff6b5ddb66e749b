#pragma once

#include "cyclock/netlist.hpp"

#include <string>
#include <string_view>

namespace cyclock {

/// Parses the BENCH dialect (INPUT/OUTPUT/assignments, `#` comments, MUX extension).
Netlist parse_bench(std::string_view text);
Netlist load_bench(const std::string& path);

/// With decompose_mux each MUX becomes OR(AND(a, NOT(s)), AND(b, s)).
std::string serialize_bench(const Netlist& n, bool decompose_mux = false);
void save_bench(const Netlist& n, const std::string& path, bool decompose_mux = false);

} // namespace cyclock
