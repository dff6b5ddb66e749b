#pragma once

#include "cyclock/netlist.hpp"

#include <cstdint>

namespace cyclock {

struct ToyParams {
	std::size_t inputs = 12;
	std::size_t gates = 120;
	std::size_t max_outputs = 8;
	std::uint64_t seed = 1;
};

/// Seeded random combinational circuit, deep enough for path-based locking.
Netlist make_toy(const ToyParams& p);

} // namespace cyclock
