#include "cyclock/cycles.hpp"
#include "cyclock/obfuscate.hpp"

#include <random>

namespace cyclock {

namespace {

struct Builder {
	Netlist& n;
	ObfuscationReport& rep;
	std::mt19937_64& rng;

	NetId mux(NetId straight, NetId cross, const std::string& hint) {
		bool c = rng() & 1;
		std::string kn = n.next_key_name();
		NetId k = n.add_input(kn);
		NetId o = n.add_gate_net(GateFunc::Mux, c ? std::vector<NetId>{k, cross, straight} : std::vector<NetId>{k, straight, cross}, hint);
		n.mark(n.driver(o));
		rep.key[kn] = c;
		++rep.muxes;
		return o;
	}

	// Benes network; every switch is two independent muxes, straight setting routes the identity
	std::vector<NetId> benes(const std::vector<NetId>& in, const std::string& tag) {
		std::size_t M = in.size();
		if (M == 1) return in;
		if (M == 2) return {mux(in[0], in[1], tag + "_s0"), mux(in[1], in[0], tag + "_s1")};
		std::vector<NetId> up, lo;
		for (std::size_t i = 0; i < M / 2; ++i) {
			up.push_back(mux(in[2 * i], in[2 * i + 1], tag + "_i" + std::to_string(2 * i)));
			lo.push_back(mux(in[2 * i + 1], in[2 * i], tag + "_i" + std::to_string(2 * i + 1)));
		}
		auto uo = benes(up, tag + "u");
		auto lo_out = benes(lo, tag + "l");
		std::vector<NetId> out;
		for (std::size_t i = 0; i < M / 2; ++i) {
			out.push_back(mux(uo[i], lo_out[i], tag + "_o" + std::to_string(2 * i)));
			out.push_back(mux(lo_out[i], uo[i], tag + "_o" + std::to_string(2 * i + 1)));
		}
		return out;
	}
};

} // namespace

Locked build_lfn(const Netlist& orig, const ObfuscationConfig& c) {
	c.check();
	Locked out{orig, {}};
	Netlist& n = out.netlist;
	auto& rep = out.report;
	rep.method = "lfn";
	rep.seed = c.seed;
	std::mt19937_64 rng(c.seed);
	std::size_t M = c.n, L = c.mc_length, h = L / 2;

	std::vector<std::vector<GateId>> paths;
	for (std::size_t i = 0; i < M; ++i) {
		auto p = select_path(n, L);
		if (p.empty()) throw NiSError("netlist is small: only " + std::to_string(i) + " of " + std::to_string(M) + " paths found");
		for (GateId g : p) n.mark(g);
		paths.push_back(p);
	}
	// split at the gate-count midpoint: end of first halves feed the network, which feeds second-half starts
	std::vector<NetId> eps;
	std::vector<std::size_t> sp_pin;
	for (const auto& p : paths) {
		NetId ep = n.gate(p[h - 1]).output;
		eps.push_back(ep);
		const auto& ins = n.gate(p[h]).inputs;
		sp_pin.push_back(static_cast<std::size_t>(std::find(ins.begin(), ins.end(), ep) - ins.begin()));
	}
	Builder b{n, rep, rng};
	auto outs = b.benes(eps, "lfn");
	for (std::size_t i = 0; i < M; ++i) n.set_gate_input(paths[i][h], sp_pin[i], outs[i]);
	// feedback from each path end to its start
	for (std::size_t i = 0; i < M; ++i) insert_pin_mux(n, paths[i][0], 0, n.gate(paths[i].back()).output, rng() & 1, &rep);
	rep.m = M;
	rep.cycle_lower_bound = lfn_lower_bound(static_cast<unsigned>(M)).str();
	rep.finalize(orig, n);
	return out;
}

} // namespace cyclock
