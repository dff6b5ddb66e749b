#include "cyclock/toy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <random>
#include <set>

namespace cyclock {

Netlist make_toy(const ToyParams& p) {
	std::mt19937_64 rng(p.seed);
	auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
	Netlist n;
	std::vector<NetId> nets;
	for (std::size_t i = 0; i < p.inputs; ++i) nets.push_back(n.add_input("x" + std::to_string(i)));
	// 128 random patterns per net; gates whose output would be nearly constant are turned into XORs
	std::mt19937_64 prng(p.seed ^ 0x5bd1e995u);
	std::vector<std::array<std::uint64_t, 2>> sig;
	for (std::size_t i = 0; i < p.inputs; ++i) sig.push_back({prng(), prng()});
	std::vector<std::size_t> uses(nets.size(), 0);
	std::set<std::size_t> unused;
	for (std::size_t i = 0; i < nets.size(); ++i) unused.insert(i);

	static const GateFunc funcs[] = {GateFunc::And, GateFunc::Nand, GateFunc::Or, GateFunc::Nor,
	                                 GateFunc::And, GateFunc::Nand, GateFunc::Or, GateFunc::Nor,
	                                 GateFunc::Xor, GateFunc::Not};
	for (std::size_t g = 0; g < p.gates; ++g) {
		GateFunc f = funcs[pick(std::size(funcs))];
		std::size_t arity = f == GateFunc::Not ? 1 : (pick(5) == 0 ? 3 : 2);
		std::vector<std::size_t> chosen;
		while (chosen.size() < arity) {
			std::size_t idx;
			std::size_t r = pick(10);
			if (!unused.empty() && r < 4) {
				auto it = unused.begin();
				std::advance(it, static_cast<long>(pick(unused.size())));
				idx = *it;
			} else if (r < 8) {
				std::size_t w = std::min<std::size_t>(nets.size(), 12);
				idx = nets.size() - 1 - pick(w);
			} else {
				idx = pick(nets.size());
			}
			if (std::find(chosen.begin(), chosen.end(), idx) != chosen.end()) {
				if (nets.size() <= arity) break;
				continue;
			}
			chosen.push_back(idx);
		}
		if (chosen.size() < arity) f = GateFunc::Not, chosen.resize(1);
		auto word = [&](GateFunc fn, int w) {
			std::uint64_t acc = sig[chosen[0]][w];
			for (std::size_t i = 1; i < chosen.size(); ++i) {
				std::uint64_t v = sig[chosen[i]][w];
				switch (fn) {
				case GateFunc::And: case GateFunc::Nand: acc &= v; break;
				case GateFunc::Or: case GateFunc::Nor: acc |= v; break;
				default: acc ^= v; break;
				}
			}
			bool inv = fn == GateFunc::Nand || fn == GateFunc::Nor || fn == GateFunc::Not;
			return inv ? ~acc : acc;
		};
		auto ones = [&](GateFunc fn) { return std::popcount(word(fn, 0)) + std::popcount(word(fn, 1)); };
		if (f != GateFunc::Not && (ones(f) < 24 || ones(f) > 104)) f = GateFunc::Xor;
		sig.push_back({word(f, 0), word(f, 1)});
		std::vector<NetId> ins;
		for (std::size_t c : chosen) {
			ins.push_back(nets[c]);
			++uses[c];
			unused.erase(c);
		}
		NetId out = n.add_gate_net(f, ins, "n" + std::to_string(g));
		nets.push_back(out);
		uses.push_back(0);
		unused.insert(nets.size() - 1);
	}
	// sinks become outputs; surplus sinks are merged pairwise so the PO count stays bounded
	std::vector<NetId> sinks;
	for (std::size_t i = p.inputs; i < nets.size(); ++i)
		if (!uses[i]) sinks.push_back(nets[i]);
	std::size_t extra = 0;
	while (sinks.size() > std::max<std::size_t>(1, p.max_outputs)) {
		NetId a = sinks[0], b = sinks[1];
		sinks.erase(sinks.begin(), sinks.begin() + 2);
		GateFunc f = (extra++ % 2) ? GateFunc::Xor : GateFunc::Nand;
		sinks.push_back(n.add_gate_net(f, {a, b}, "m" + std::to_string(extra)));
	}
	for (NetId s : sinks) n.add_output(s);
	return n;
}

} // namespace cyclock
