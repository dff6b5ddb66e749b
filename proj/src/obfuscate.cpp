#include "cyclock/obfuscate.hpp"

#include "cyclock/cnf.hpp"
#include "cyclock/cycles.hpp"
#include "cyclock/graph.hpp"
#include "cyclock/sim.hpp"
#include "cyclock/timing.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace cyclock {

const char* to_string(Method m) {
	switch (m) {
	case Method::SC: return "sc";
	case Method::LFN: return "lfn";
	case Method::SRLatch: return "srlatch";
	case Method::Template: return "template";
	case Method::Composite: return "composite";
	}
	return "?";
}

std::optional<Method> method_from_name(const std::string& s) {
	if (s == "sc") return Method::SC;
	if (s == "lfn") return Method::LFN;
	if (s == "srlatch") return Method::SRLatch;
	if (s == "template") return Method::Template;
	if (s == "composite") return Method::Composite;
	return std::nullopt;
}

void ObfuscationConfig::check() const {
	if (mc_length < 3) throw ConfigError("mc_length must be at least 3");
	if (method == Method::LFN && (n == 0 || (n & (n - 1)) != 0)) throw ConfigError("LFN path count must be a power of two");
	if ((method == Method::SC || method == Method::LFN) && n == 0 && !saturate) throw ConfigError("n must be positive");
	if (method == Method::SRLatch && sr_count == 0) throw ConfigError("sr_count must be positive");
	if (slack_budget_percent && *slack_budget_percent < 0) throw ConfigError("slack budget must be non-negative");
	if (method == Method::Composite)
		for (const auto& s : steps) {
			if (s.method == Method::Composite) throw ConfigError("nested composite");
			s.check();
		}
}

void ObfuscationReport::finalize(const Netlist& before, const Netlist& after) {
	original_gates = before.num_gates();
	added_gates = after.num_gates() - before.num_gates();
	overhead_pct = original_gates ? 100.0 * static_cast<double>(added_gates) / static_cast<double>(original_gates) : 0.0;
}

void ObfuscationReport::merge(const ObfuscationReport& r) {
	for (const auto& [k, v] : r.key) key[k] = v;
	m += r.m;
	muxes += r.muxes;
	latches += r.latches;
	templates += r.templates;
	notes.insert(notes.end(), r.notes.begin(), r.notes.end());
}

NetId insert_mux(Netlist& n, NetId victim, NetId alt, const std::string& key_name, bool correct_bit,
                 ObfuscationReport* rep) {
	if (n.find(key_name)) throw NetlistError("name collision: '" + key_name + "'");
	if (victim >= n.num_nets() || alt >= n.num_nets()) throw NetlistError("unknown net");
	NetId k = n.add_input(key_name);
	NetId out = n.add_net(n.fresh_name(n.net(victim).name + "_lk"));
	n.redirect_consumers(victim, out);
	GateId g = n.add_gate(GateFunc::Mux, correct_bit ? std::vector<NetId>{k, alt, victim} : std::vector<NetId>{k, victim, alt}, out);
	n.mark(g);
	if (rep) {
		rep->key[key_name] = correct_bit;
		++rep->muxes;
	}
	return out;
}

GateId insert_pin_mux(Netlist& n, GateId g, std::size_t pin, NetId alt, bool correct_bit, ObfuscationReport* rep) {
	NetId orig = n.gate(g).inputs.at(pin);
	std::string kn = n.next_key_name();
	NetId k = n.add_input(kn);
	NetId out = n.add_net(n.fresh_name(n.net(orig).name + "_m"));
	GateId m = n.add_gate(GateFunc::Mux, correct_bit ? std::vector<NetId>{k, alt, orig} : std::vector<NetId>{k, orig, alt}, out);
	n.set_gate_input(g, pin, out);
	n.mark(m);
	if (rep) {
		rep->key[kn] = correct_bit;
		++rep->muxes;
	}
	return m;
}

std::vector<GateId> select_path(const Netlist& n, std::size_t len) {
	std::size_t G = n.num_gates();
	std::vector<char> ok(G, 0);
	for (GateId g = 0; g < G; ++g) ok[g] = !n.marked(g) && n.gate(g).func != GateFunc::Mux;

	std::vector<std::pair<std::size_t, std::size_t>> pos; // (-cone size, index)
	std::vector<std::vector<GateId>> cones;
	for (std::size_t i = 0; i < n.outputs().size(); ++i) {
		cones.push_back(fanin_cone(n, n.outputs()[i]));
		pos.push_back({cones.back().size(), i});
	}
	std::stable_sort(pos.begin(), pos.end(), [](auto a, auto b) { return a.first > b.first; });
	auto succ = n.successors();

	for (auto [sz, oi] : pos) {
		if (sz < len) continue;
		std::vector<char> in(G, 0);
		for (GateId g : cones[oi])
			if (ok[g]) in[g] = 1;
		// Kahn over the eligible induced subgraph
		std::vector<int> indeg(G, 0);
		for (GateId g = 0; g < G; ++g)
			if (in[g])
				for (GateId s : succ[g])
					if (in[s] && s != g) ++indeg[s];
		std::vector<GateId> order, ready;
		for (GateId g = 0; g < G; ++g)
			if (in[g] && !indeg[g]) ready.push_back(g);
		std::sort(ready.rbegin(), ready.rend());
		while (!ready.empty()) {
			GateId g = ready.back();
			ready.pop_back();
			order.push_back(g);
			for (GateId s : succ[g])
				if (in[s] && s != g && --indeg[s] == 0) {
					ready.push_back(s);
					std::sort(ready.rbegin(), ready.rend());
				}
		}
		std::vector<std::size_t> dp(G, 0);
		std::vector<GateId> parent(G, kNone);
		for (GateId g : order) {
			if (!dp[g]) dp[g] = 1;
			for (GateId s : succ[g]) {
				if (!in[s] || s == g) continue;
				if (dp[g] + 1 > dp[s] || (dp[g] + 1 == dp[s] && g < parent[s])) {
					dp[s] = dp[g] + 1;
					parent[s] = g;
				}
			}
		}
		GateId best = kNone;
		for (GateId g : order)
			if (best == kNone || dp[g] > dp[best] || (dp[g] == dp[best] && g < best)) best = g;
		if (best == kNone || dp[best] < len) continue;
		std::vector<GateId> chain;
		for (GateId g = best; g != kNone; g = parent[g]) chain.push_back(g);
		std::reverse(chain.begin(), chain.end());
		return std::vector<GateId>(chain.end() - static_cast<long>(len), chain.end());
	}
	return {};
}

namespace {

std::size_t pin_of(const Netlist& n, GateId g, NetId net) {
	const auto& in = n.gate(g).inputs;
	for (std::size_t i = 0; i < in.size(); ++i)
		if (in[i] == net) return i;
	return 0;
}

/// Data pin of a key mux holding the non-original input.
std::size_t alt_pin(const Netlist& n, const ObfuscationReport& rep, GateId mux) {
	bool c = rep.key.at(n.net(n.gate(mux).inputs[0]).name);
	return c ? 1 : 2;
}

/// A net in the fanin of `near` that is not downstream of gate `g`; falls back to a primary input.
NetId pick_decoy(const Netlist& n, GateId g, NetId near, std::mt19937_64& rng) {
	auto tfo = fanout_cone(n, n.gate(g).output);
	std::set<GateId> down(tfo.begin(), tfo.end());
	down.insert(g);
	std::vector<NetId> cand;
	for (GateId h : fanin_cone(n, near))
		if (!down.count(h) && n.gate(h).func != GateFunc::Mux && n.gate(h).output != near) cand.push_back(n.gate(h).output);
	if (cand.empty())
		for (NetId p : n.primary_inputs())
			if (p != near) cand.push_back(p);
	if (cand.empty()) return near;
	return cand[rng() % cand.size()];
}

} // namespace

std::vector<GateId> build_micro_cycle(Netlist& n, const std::vector<GateId>& path, std::uint64_t seed,
                                      ObfuscationReport& rep) {
	if (path.size() < 3) throw NiSError("micro cycle path too short");
	for (GateId g : path)
		if (n.marked(g)) throw ConfigError("path gate already used");
	std::mt19937_64 rng(seed);
	std::size_t L = path.size(), mid = L / 2;
	NetId fb = n.gate(path.back()).output;
	std::vector<GateId> muxes;
	for (std::size_t i = 0; i < L; ++i) {
		std::size_t pin = i ? pin_of(n, path[i], n.gate(path[i - 1]).output) : 0;
		NetId orig = n.gate(path[i]).inputs[pin];
		NetId alt = (i == 0 || i == mid) ? fb : pick_decoy(n, path[i], orig, rng);
		muxes.push_back(insert_pin_mux(n, path[i], pin, alt, rng() & 1, &rep));
	}
	for (GateId g : path) n.mark(g);
	return muxes;
}

Locked build_super_cycle(const Netlist& orig, const ObfuscationConfig& c) {
	c.check();
	Locked out{orig, {}};
	Netlist& n = out.netlist;
	auto& rep = out.report;
	rep.method = "sc";
	rep.seed = c.seed;
	std::mt19937_64 rng(c.seed);
	std::size_t L = c.mc_length, mid = L / 2;

	std::vector<std::vector<GateId>> paths, muxes;
	std::vector<std::vector<std::size_t>> free_slots;
	std::vector<std::size_t> ring_into_first; // slots of MC 0 fed by the current last MC
	for (unsigned i = 0; i < c.n; ++i) {
		auto path = select_path(n, L);
		if (path.empty())
			throw NiSError("netlist is small: no free path of " + std::to_string(L) + " gates for MC " + std::to_string(i + 1));
		auto mx = build_micro_cycle(n, path, rng(), rep);
		std::vector<std::size_t> slots;
		for (std::size_t s = 1; s < L; ++s)
			if (s != mid) slots.push_back(s);
		std::shuffle(slots.begin(), slots.end(), rng);
		paths.push_back(path);
		muxes.push_back(mx);
		free_slots.push_back(slots);
		if (i == 0) continue;
		// splice MC i into the ring between MC i-1 and MC 0
		NetId prev_end = n.gate(paths[i - 1].back()).output, cur_end = n.gate(path.back()).output;
		for (int e = 0; e < 2 && !free_slots[i].empty(); ++e) {
			std::size_t s = free_slots[i].back();
			free_slots[i].pop_back();
			n.set_gate_input(muxes[i][s], alt_pin(n, rep, muxes[i][s]), prev_end);
		}
		if (i == 1)
			for (int e = 0; e < 2 && !free_slots[0].empty(); ++e) {
				ring_into_first.push_back(free_slots[0].back());
				free_slots[0].pop_back();
			}
		for (std::size_t s : ring_into_first) n.set_gate_input(muxes[0][s], alt_pin(n, rep, muxes[0][s]), cur_end);
	}
	// extra cross edges from random MC signals
	for (std::size_t i = 0; i < paths.size(); ++i)
		for (unsigned e = 0; e < c.extra_edges && !free_slots[i].empty(); ++e) {
			std::size_t s = free_slots[i].back();
			free_slots[i].pop_back();
			std::size_t j = paths.size() > 1 ? (i + 1 + rng() % (paths.size() - 1)) % paths.size() : i;
			std::size_t lo = j == i ? s : 0;
			GateId src = paths[j][lo + rng() % (L - lo)];
			n.set_gate_input(muxes[i][s], alt_pin(n, rep, muxes[i][s]), n.gate(src).output);
		}
	rep.m = c.n;
	rep.cycle_lower_bound = (boost::multiprecision::cpp_int(1) << c.n).str();
	rep.finalize(orig, n);
	return out;
}

ComboVerdict find_nonoccurring_combo(const Netlist& n, const std::vector<NetId>& nets, const std::vector<bool>& pattern,
                                     const KeyAssignment& key) {
	if (nets.size() != pattern.size()) throw std::invalid_argument("pattern width mismatch");
	Solver s;
	SolverSink sink(s);
	auto lit = encode_netlist(sink, n);
	for (NetId k : n.key_inputs()) {
		auto it = key.find(n.net(k).name);
		if (it != key.end()) s.add_clause({it->second ? lit[k] : -lit[k]});
	}
	for (std::size_t i = 0; i < nets.size(); ++i) s.add_clause({pattern[i] ? lit[nets[i]] : -lit[nets[i]]});
	ComboVerdict v;
	if (s.solve() != SatStatus::Sat) return v;
	v.occurs = true;
	for (NetId p : n.primary_inputs()) v.witness.push_back(s.lit_value(lit[p]));
	return v;
}

// ---------------------------------------------------------------- template

namespace {

const std::array<std::uint8_t, 6>& template_tables() {
	static const std::array<std::uint8_t, 6> t = [] {
		Netlist n;
		NetId x1 = n.add_input("x1"), x2 = n.add_input("x2"), x3 = n.add_input("x3");
		auto outs = add_rivest_template(n, x1, x2, x3, "t");
		for (NetId o : outs) n.add_output(o);
		std::array<std::uint8_t, 6> tt{};
		for (unsigned m = 0; m < 8; ++m) {
			auto r = evaluate_cyclic(n, {bool(m & 1), bool(m & 2), bool(m & 4)});
			for (std::size_t i = 0; i < 6; ++i)
				if (r.outputs[i] == Tri::One) tt[i] |= static_cast<std::uint8_t>(1u << m);
		}
		return tt;
	}();
	return t;
}

/// Truth table of `root` over the 3 leaves (bit m: leaf i = bit i of m); nullopt when the cone escapes.
std::optional<std::uint8_t> cut_table(const Netlist& n, GateId root, const std::array<NetId, 3>& leaves) {
	std::map<NetId, unsigned> val;
	std::vector<GateId> order;
	std::set<GateId> seen;
	std::vector<std::pair<GateId, bool>> st{{root, false}};
	while (!st.empty()) {
		auto [g, post] = st.back();
		st.pop_back();
		if (post) {
			order.push_back(g);
			continue;
		}
		if (!seen.insert(g).second) continue;
		st.push_back({g, true});
		for (NetId in : n.gate(g).inputs) {
			if (std::find(leaves.begin(), leaves.end(), in) != leaves.end()) continue;
			GateId d = n.driver(in);
			if (d == kNone || n.gate(d).func == GateFunc::Mux || n.marked(d)) return std::nullopt;
			if (seen.count(d)) continue;
			if (seen.size() > 12) return std::nullopt;
			st.push_back({d, false});
		}
	}
	std::uint8_t tt = 0;
	for (unsigned m = 0; m < 8; ++m) {
		std::map<NetId, Tri> v;
		for (int i = 0; i < 3; ++i) v[leaves[i]] = tri((m >> i) & 1);
		std::vector<Tri> in;
		for (GateId g : order) {
			in.clear();
			for (NetId x : n.gate(g).inputs) {
				auto it = v.find(x);
				if (it == v.end()) return std::nullopt; // cyclic inside the cone
				in.push_back(it->second);
			}
			v[n.gate(g).output] = eval_tri(n.gate(g).func, in.data(), in.size());
		}
		if (v[n.gate(root).output] == Tri::One) tt |= static_cast<std::uint8_t>(1u << m);
	}
	return tt;
}

std::uint8_t permute_table(std::uint8_t tt, const std::array<int, 3>& p) {
	// new leaf j = old leaf p[j]
	std::uint8_t r = 0;
	for (unsigned m = 0; m < 8; ++m) {
		unsigned old = 0;
		for (int j = 0; j < 3; ++j)
			if ((m >> j) & 1) old |= 1u << p[j];
		if ((tt >> old) & 1) r |= static_cast<std::uint8_t>(1u << m);
	}
	return r;
}

} // namespace

std::vector<NetId> add_rivest_template(Netlist& n, NetId x1, NetId x2, NetId x3, const std::string& prefix) {
	std::vector<NetId> g(6);
	for (int i = 0; i < 6; ++i) g[i] = n.add_net(n.fresh_name(prefix + "_g" + std::to_string(i + 1)));
	auto add = [&](GateFunc f, NetId a, NetId b, NetId o) { n.mark(n.add_gate(f, {a, b}, o)); };
	add(GateFunc::And, x1, g[5], g[0]);
	add(GateFunc::Or, x2, g[0], g[1]);
	add(GateFunc::And, x3, g[1], g[2]);
	add(GateFunc::Or, x1, g[2], g[3]);
	add(GateFunc::And, x2, g[3], g[4]);
	add(GateFunc::Or, x3, g[4], g[5]);
	return g;
}

std::vector<TemplateMatch> find_template_matches(const Netlist& n) {
	const auto& tt = template_tables();
	std::vector<TemplateMatch> out;
	// 3-feasible cuts by merging fanin cuts
	auto fb = find_feedback_set(n);
	auto order = topo_order(n, std::set<Edge>(fb.begin(), fb.end()));
	if (!order) return out;
	std::vector<std::set<std::vector<NetId>>> cuts(n.num_nets());
	auto leaf_cut = [&](NetId x) -> std::set<std::vector<NetId>> {
		std::set<std::vector<NetId>> s = cuts[x];
		s.insert({x});
		return s;
	};
	static const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
	for (GateId g : *order) {
		const Gate& gt = n.gate(g);
		if (gt.func == GateFunc::Mux || n.marked(g) || gt.inputs.size() > 3) continue;
		std::set<std::vector<NetId>> acc{{}};
		bool bad = false;
		for (NetId in : gt.inputs) {
			std::set<std::vector<NetId>> next;
			auto lc = leaf_cut(in);
			for (const auto& a : acc)
				for (const auto& b : lc) {
					std::vector<NetId> u = a;
					u.insert(u.end(), b.begin(), b.end());
					std::sort(u.begin(), u.end());
					u.erase(std::unique(u.begin(), u.end()), u.end());
					if (u.size() <= 3) next.insert(u);
				}
			acc = std::move(next);
			if (acc.empty()) {
				bad = true;
				break;
			}
		}
		if (bad) continue;
		cuts[gt.output] = acc;
		if (cuts[gt.output].size() > 24) {
			auto it = cuts[gt.output].begin();
			std::advance(it, 24);
			cuts[gt.output].erase(it, cuts[gt.output].end());
		}
		for (const auto& cut : acc) {
			if (cut.size() != 3) continue;
			std::array<NetId, 3> leaves{cut[0], cut[1], cut[2]};
			auto t = cut_table(n, g, leaves);
			if (!t) continue;
			bool found = false;
			for (const auto& p : perms) {
				std::uint8_t pt = permute_table(*t, p);
				for (int o = 0; o < 6 && !found; ++o)
					for (int cpl = 0; cpl < 2 && !found; ++cpl) {
						std::uint8_t want = cpl ? static_cast<std::uint8_t>(~tt[o]) : tt[o];
						if (pt == want) {
							out.push_back({g, {leaves[p[0]], leaves[p[1]], leaves[p[2]]}, o, cpl == 1});
							found = true;
						}
					}
				if (found) break;
			}
			if (found) break;
		}
	}
	return out;
}

Locked rivest_template_insert(const Netlist& orig, std::uint64_t seed, unsigned count) {
	Locked out{orig, {}};
	Netlist& n = out.netlist;
	auto& rep = out.report;
	rep.method = "template";
	rep.seed = seed;
	std::mt19937_64 rng(seed);
	auto matches = find_template_matches(n);
	std::shuffle(matches.begin(), matches.end(), rng);
	std::set<GateId> used;
	for (const auto& m : matches) {
		if (rep.templates >= count) break;
		if (used.count(m.root)) continue;
		NetId root_out = n.gate(m.root).output;
		auto outs = add_rivest_template(n, m.leaves[0], m.leaves[1], m.leaves[2], n.net(root_out).name + "_rt");
		NetId repl = outs[static_cast<std::size_t>(m.output)];
		std::vector<GateId> keep;
		for (GateId g = static_cast<GateId>(n.num_gates() - 6); g < n.num_gates(); ++g) keep.push_back(g);
		if (m.complement) {
			repl = n.add_gate_net(GateFunc::Not, {repl}, n.net(root_out).name + "_rtn");
			keep.push_back(n.driver(repl));
			n.mark(n.driver(repl));
		}
		n.redirect_consumers(root_out, repl, keep);
		used.insert(m.root);
		++rep.templates;
	}
	if (!rep.templates) rep.notes.push_back("no template match");
	rep.finalize(orig, n);
	return out;
}

Locked obfuscate(const Netlist& n, const ObfuscationConfig& c) {
	c.check();
	if (c.slack_budget_percent && c.method == Method::SC) return timing_aware_obfuscate(n, c, DelayModel{});
	switch (c.method) {
	case Method::SC: return build_super_cycle(n, c);
	case Method::LFN: return build_lfn(n, c);
	case Method::SRLatch: return sr_latch_cyclify(n, c.sr_count, c.seed);
	case Method::Template: return rivest_template_insert(n, c.seed, std::max(1u, c.n));
	case Method::Composite: return compose(n, c.steps);
	}
	throw ConfigError("unknown method");
}

Locked compose(const Netlist& orig, const std::vector<ObfuscationConfig>& steps) {
	Locked out{orig, {}};
	out.report.method = "composite";
	std::string methods;
	for (const auto& s : steps) {
		if (s.method == Method::Composite) throw ConfigError("nested composite");
		Locked step = s.method == Method::SRLatch ? sr_latch_cyclify(out.netlist, s.sr_count, s.seed, out.report.key)
		                                          : obfuscate(out.netlist, s);
		out.netlist = std::move(step.netlist);
		out.report.merge(step.report);
		if (step.report.method == "sc" || step.report.method == "lfn") out.report.cycle_lower_bound = step.report.cycle_lower_bound;
		methods += (methods.empty() ? "" : "+") + step.report.method;
		out.report.seed = s.seed;
	}
	if (!methods.empty()) out.report.notes.push_back("steps: " + methods);
	out.report.finalize(orig, out.netlist);
	return out;
}

} // namespace cyclock
