#include "cyclock/graph.hpp"
#include "cyclock/obfuscate.hpp"
#include "cyclock/sim.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace cyclock {

namespace {

std::vector<Bits> sample_inputs(std::size_t pis, std::mt19937_64& rng) {
	std::vector<Bits> v;
	if (pis <= 8) {
		for (std::uint64_t m = 0; m < (1ull << pis); ++m) {
			Bits b(pis);
			for (std::size_t i = 0; i < pis; ++i) b[i] = (m >> i) & 1;
			v.push_back(b);
		}
		return v;
	}
	for (int t = 0; t < 256; ++t) {
		Bits b(pis);
		for (std::size_t i = 0; i < pis; ++i) b[i] = rng() & 1;
		v.push_back(b);
	}
	return v;
}

} // namespace

Locked sr_latch_cyclify(const Netlist& orig, unsigned count, std::uint64_t seed, const KeyAssignment& current) {
	if (count == 0) throw ConfigError("sr_count must be positive");
	Locked out{orig, {}};
	Netlist& n = out.netlist;
	auto& rep = out.report;
	rep.method = "srlatch";
	rep.seed = seed;
	std::mt19937_64 rng(seed);
	auto full_key = [&] {
		KeyAssignment k = current;
		for (auto& [a, b] : rep.key) k[a] = b;
		return k;
	};
	auto samples = sample_inputs(n.primary_inputs().size(), rng);

	for (unsigned li = 0; li < count; ++li) {
		bool done = false;
		std::vector<GateId> ys;
		for (GateId g = 0; g < n.num_gates(); ++g)
			if (!n.marked(g) && n.gate(g).func != GateFunc::Mux) ys.push_back(g);
		std::shuffle(ys.begin(), ys.end(), rng);
		auto key = full_key();
		// sampled values steer the search: only patterns never seen in simulation go to the solver
		CyclicEvaluator ev(n, n.key_bits(key));
		std::vector<std::vector<Tri>> states;
		for (const auto& s : samples) states.push_back(ev.ternary(s, 0));
		int probes = 0;
		for (std::size_t yi = 0; yi < ys.size() && yi < 64 && !done && probes < 256; ++yi) {
			NetId y = n.gate(ys[yi]).output;
			auto tfo_v = fanout_cone(n, y);
			std::set<GateId> tfo(tfo_v.begin(), tfo_v.end());
			tfo.insert(ys[yi]);
			auto outside = [&](NetId x) {
				GateId d = n.driver(x);
				return x != y && !n.is_key(x) && (d == kNone || (!tfo.count(d) && !n.marked(d)));
			};
			// internal nets first, they are the correlated ones
			std::vector<NetId> pool;
			for (GateId g : fanin_cone(n, y))
				if (outside(n.gate(g).output) && n.gate(g).func != GateFunc::Mux) pool.push_back(n.gate(g).output);
			if (pool.size() < 6)
				for (NetId p : n.primary_inputs())
					if (std::find(pool.begin(), pool.end(), p) == pool.end()) pool.push_back(p);
			if (pool.size() < 3) continue;

			std::vector<NetId> nets;
			std::vector<bool> pattern;
			bool found = false;
			for (int draw = 0; draw < 8 && probes < 256 && !found; ++draw) {
				std::shuffle(pool.begin(), pool.end(), rng);
				std::size_t w = std::min<std::size_t>(3 + rng() % 2, pool.size());
				nets.assign(pool.begin(), pool.begin() + static_cast<long>(w));
				std::set<unsigned> seen;
				for (const auto& st : states) {
					unsigned code = 0;
					bool known = true;
					for (std::size_t i = 0; i < w; ++i) {
						if (st[nets[i]] == Tri::X) known = false;
						code |= (st[nets[i]] == Tri::One ? 1u : 0u) << i;
					}
					if (known) seen.insert(code);
				}
				std::vector<unsigned> cand;
				for (unsigned code = 0; code < (1u << w); ++code)
					if (!seen.count(code)) cand.push_back(code);
				std::shuffle(cand.begin(), cand.end(), rng);
				for (unsigned code : cand) {
					if (probes++ >= 256) break;
					pattern.assign(w, false);
					for (std::size_t i = 0; i < w; ++i) pattern[i] = (code >> i) & 1;
					if (!find_nonoccurring_combo(n, nets, pattern, key).occurs) {
						found = true;
						break;
					}
				}
			}
			if (!found) continue;

			// latch feedback alternative: often 1 together with y, where an opened latch misbehaves
			std::vector<NetId> alts;
			for (NetId x = 0; x < n.num_nets(); ++x)
				if (outside(x) && (n.driver(x) == kNone || n.gate(n.driver(x)).func != GateFunc::Mux)) alts.push_back(x);
			std::vector<std::pair<int, NetId>> score;
			for (NetId a : alts) {
				int sc = 0;
				for (const auto& st : states) sc += st[y] == Tri::One && st[a] == Tri::One;
				if (sc) score.push_back({-sc, a});
			}
			if (score.empty()) continue;
			std::stable_sort(score.begin(), score.end());
			if (score.size() > 6) score.resize(6);
			std::shuffle(score.begin(), score.end(), rng);

			Netlist before = n;
			ObfuscationReport rep_before = rep;
			std::string tag = n.net(y).name + "_sr";
			std::vector<NetId> lits;
			std::vector<GateId> added;
			for (std::size_t i = 0; i < nets.size(); ++i) {
				NetId decoy = pool.size() > nets.size() ? pool[nets.size() + rng() % (pool.size() - nets.size())]
				                                        : nets[(i + 1) % nets.size()];
				bool c = rng() & 1;
				std::string kn = n.next_key_name();
				NetId k = n.add_input(kn);
				NetId w = n.add_gate_net(GateFunc::Mux, c ? std::vector<NetId>{k, decoy, nets[i]} : std::vector<NetId>{k, nets[i], decoy},
				                         tag + "_w" + std::to_string(i));
				added.push_back(n.driver(w));
				rep.key[kn] = c;
				++rep.muxes;
				if (!pattern[i]) {
					w = n.add_gate_net(GateFunc::Not, {w}, tag + "_n" + std::to_string(i));
					added.push_back(n.driver(w));
				}
				lits.push_back(w);
			}
			NetId p = n.add_gate_net(GateFunc::And, lits, tag + "_p");
			added.push_back(n.driver(p));
			NetId R = n.add_gate_net(GateFunc::Nor, {y, p}, tag + "_r");
			added.push_back(n.driver(R));
			NetId Q = n.add_net(n.fresh_name(tag + "_q"));
			NetId Qb = n.add_gate_net(GateFunc::Nor, {y, Q}, tag + "_qb");
			added.push_back(n.driver(Qb));
			bool cf = rng() & 1;
			std::string kf = n.next_key_name();
			NetId kfn = n.add_input(kf);
			NetId alt = score.front().second;
			NetId fbm = n.add_gate_net(GateFunc::Mux, cf ? std::vector<NetId>{kfn, alt, Qb} : std::vector<NetId>{kfn, Qb, alt},
			                           tag + "_fb");
			GateId fbg = n.driver(fbm);
			added.push_back(fbg);
			added.push_back(n.add_gate(GateFunc::Nor, {R, fbm}, Q));
			rep.key[kf] = cf;
			++rep.muxes;
			n.redirect_consumers(y, Q, {n.driver(R), n.driver(Qb)});
			for (GateId g : added) n.mark(g);

			// the opened latch has to be observable at some output
			auto key_now = full_key();
			auto wrong = key_now;
			wrong[kf] = !cf;
			bool observable = false;
			for (std::size_t ai = 0; ai < score.size() && !observable; ++ai) {
				n.set_gate_input(fbg, cf ? 1 : 2, score[ai].second);
				for (const auto& s : samples) {
					auto r0 = evaluate_cyclic(before, s, key);
					auto r1 = evaluate_cyclic(n, s, wrong);
					if (r0.status != r1.status || r0.outputs != r1.outputs) {
						observable = true;
						break;
					}
				}
			}
			if (!observable) {
				n = std::move(before);
				rep = std::move(rep_before);
				continue;
			}
			if (find_nonoccurring_combo(n, {y, R}, {true, true}, key_now).occurs)
				throw std::logic_error("latch set and reset both reachable");
			++rep.latches;
			++rep.m;
			done = true;
		}
		if (!done) throw NiSError("no non-occurring pattern found for latch " + std::to_string(li + 1));
	}
	rep.cycle_lower_bound = std::to_string(rep.latches);
	rep.finalize(orig, n);
	return out;
}

} // namespace cyclock
