#pragma once

#include "cyclock/attacks.hpp"
#include "cyclock/bench.hpp"
#include "cyclock/cycles.hpp"
#include "cyclock/obfuscate.hpp"
#include "cyclock/sim.hpp"
#include "cyclock/toy.hpp"

#include <random>
#include <string>

namespace th {

inline std::string data(const std::string& f) { return std::string(CYCLOCK_TEST_DATA) + "/" + f; }

inline cyclock::Netlist load(const std::string& f) { return cyclock::load_bench(data(f)); }

inline std::vector<cyclock::Bits> all_inputs(std::size_t w) {
	std::vector<cyclock::Bits> v;
	for (std::uint64_t m = 0; m < (1ull << w); ++m) {
		cyclock::Bits b(w);
		for (std::size_t i = 0; i < w; ++i) b[i] = (m >> i) & 1;
		v.push_back(b);
	}
	return v;
}

inline cyclock::Netlist toy(std::size_t inputs, std::size_t gates, std::uint64_t seed, std::size_t outs = 8) {
	cyclock::ToyParams p;
	p.inputs = inputs;
	p.gates = gates;
	p.max_outputs = outs;
	p.seed = seed;
	return cyclock::make_toy(p);
}

// exhaustive, through the cyclic evaluator so locked circuits are fine too
inline bool same_function(const cyclock::Netlist& a, const cyclock::Netlist& b, const cyclock::KeyAssignment& kb = {}) {
	for (const auto& x : all_inputs(a.primary_inputs().size())) {
		auto ra = cyclock::evaluate_cyclic(a, x);
		auto rb = cyclock::evaluate_cyclic(b, x, kb);
		if (ra.status != cyclock::EvalStatus::Stable || rb.status != cyclock::EvalStatus::Stable) return false;
		if (ra.outputs != rb.outputs) return false;
	}
	return true;
}

} // namespace th
