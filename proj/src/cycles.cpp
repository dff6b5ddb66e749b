#include "cyclock/cycles.hpp"

#include "cyclock/sim.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace cyclock {

const char* to_string(NcCondition c) { return c == NcCondition::Structural ? "structural" : "sensitizable"; }

const char* to_string(Traversal t) {
	switch (t) {
	case Traversal::PerFeedbackRuleI: return "per-feedback-rule-i";
	case Traversal::PerFeedbackRuleII: return "per-feedback";
	case Traversal::PerCycle: return "per-cycle";
	}
	return "?";
}

// ---------------------------------------------------------------- enumeration

namespace {

class Johnson {
public:
	Johnson(const Netlist& n, const std::function<bool(const Cycle&)>& visit, Deadline deadline)
	    : succ_(n.successors()), pred_(n.predecessors()), visit_(visit), deadline_(deadline) {}

	// false when stopped early
	bool run(const std::vector<std::vector<GateId>>& comps) {
		std::size_t G = succ_.size();
		blocked_.assign(G, 0);
		B_.assign(G, {});
		in_comp_.assign(G, 0);
		for (const auto& comp : comps) {
			for (std::size_t si = 0; si < comp.size(); ++si) {
				GateId s = comp[si];
				// vertices of comp that are >= s and strongly connected to s inside that subgraph
				auto sub = component_of(comp, s);
				if (sub.empty()) continue;
				for (GateId v : sub) {
					in_comp_[v] = 1;
					blocked_[v] = 0;
					B_[v].clear();
				}
				bool ok = circuit(s);
				for (GateId v : sub) in_comp_[v] = 0;
				if (!ok) return false;
			}
		}
		return true;
	}

private:
	// SCC containing s in the subgraph induced by {v in comp, v >= s}; empty if trivial
	std::vector<GateId> component_of(const std::vector<GateId>& comp, GateId s) {
		std::vector<GateId> allowed;
		for (GateId v : comp)
			if (v >= s) allowed.push_back(v);
		for (GateId v : allowed) in_comp_[v] = 2;
		// forward reachability from s
		std::vector<GateId> st{s};
		std::set<GateId> f{s};
		while (!st.empty()) {
			GateId v = st.back();
			st.pop_back();
			for (GateId w : succ_[v])
				if (in_comp_[w] == 2 && f.insert(w).second) st.push_back(w);
		}
		bool self = std::binary_search(succ_[s].begin(), succ_[s].end(), s);
		std::set<GateId> b{s};
		st.push_back(s);
		while (!st.empty()) {
			GateId v = st.back();
			st.pop_back();
			for (GateId w : pred_[v])
				if (in_comp_[w] == 2 && f.count(w) && b.insert(w).second) st.push_back(w);
		}
		for (GateId v : allowed) in_comp_[v] = 0;
		std::vector<GateId> out;
		for (GateId v : f)
			if (b.count(v)) out.push_back(v);
		if (out.size() == 1 && !self) out.clear();
		return out;
	}

	void unblock(GateId u) {
		std::vector<GateId> st{u};
		blocked_[u] = 0;
		while (!st.empty()) {
			GateId x = st.back();
			st.pop_back();
			for (GateId w : B_[x])
				if (blocked_[w]) {
					blocked_[w] = 0;
					st.push_back(w);
				}
			B_[x].clear();
		}
	}

	bool circuit(GateId s) {
		struct Frame {
			GateId v;
			std::size_t i;
			bool found;
		};
		std::vector<Frame> stack{{s, 0, false}};
		path_.assign(1, s);
		blocked_[s] = 1;
		while (!stack.empty()) {
			Frame& fr = stack.back();
			if ((++steps_ & 4095) == 0 && deadline_.expired()) return false;
			const auto& adj = succ_[fr.v];
			if (fr.i < adj.size()) {
				GateId w = adj[fr.i++];
				if (!in_comp_[w]) continue;
				if (w == s) {
					if (!visit_(path_)) return false;
					fr.found = true;
				} else if (!blocked_[w]) {
					blocked_[w] = 1;
					path_.push_back(w);
					stack.push_back({w, 0, false});
				}
				continue;
			}
			GateId v = fr.v;
			bool found = fr.found;
			if (found) {
				unblock(v);
			} else {
				for (GateId w : adj)
					if (in_comp_[w] && std::find(B_[w].begin(), B_[w].end(), v) == B_[w].end()) B_[w].push_back(v);
			}
			stack.pop_back();
			path_.pop_back();
			if (!stack.empty()) stack.back().found |= found;
		}
		return true;
	}

	std::vector<std::vector<GateId>> succ_, pred_;
	const std::function<bool(const Cycle&)>& visit_;
	Deadline deadline_;
	std::vector<char> blocked_;
	std::vector<std::vector<GateId>> B_;
	std::vector<char> in_comp_;
	std::vector<GateId> path_;
	std::uint64_t steps_ = 0;
};

} // namespace

bool for_each_cycle(const Netlist& n, const std::function<bool(const Cycle&)>& visit, Deadline deadline) {
	Johnson j(n, visit, deadline);
	return j.run(scc(n));
}

CycleSet enumerate_cycles(const Netlist& n, std::uint64_t max_count, Deadline deadline, bool store) {
	CycleSet cs;
	bool stopped_by_cap = false;
	bool done = for_each_cycle(
	    n,
	    [&](const Cycle& c) {
		    if (cs.count >= max_count) {
			    stopped_by_cap = true;
			    return false;
		    }
		    ++cs.count;
		    ++cs.histogram[c.size()];
		    if (store) cs.cycles.push_back(c);
		    return true;
	    },
	    deadline);
	cs.truncated = !done || stopped_by_cap;
	return cs;
}

// ---------------------------------------------------------------- NC literals

std::optional<NetLit> bk(const Netlist& n, GateId from, GateId to) {
	if (!n.is_key_mux(to)) return std::nullopt;
	const Gate& g = n.gate(to);
	NetId o = n.gate(from).output;
	bool on_a = g.inputs[1] == o, on_b = g.inputs[2] == o;
	if (on_a == on_b) return std::nullopt; // select pin only, or both data pins
	return NetLit{g.inputs[0], on_a};      // a is steered away by sel=1
}

NcClause ns(const Netlist& n, GateId from, GateId to) {
	const Gate& g = n.gate(to);
	NetId o = n.gate(from).output;
	NcClause c;
	switch (g.func) {
	case GateFunc::And:
	case GateFunc::Nand:
	case GateFunc::Or:
	case GateFunc::Nor: {
		bool ctrl = g.func == GateFunc::Or || g.func == GateFunc::Nor;
		for (NetId in : g.inputs)
			if (in != o) c.push_back({in, ctrl});
		break;
	}
	case GateFunc::Mux: {
		bool on_a = g.inputs[1] == o, on_b = g.inputs[2] == o;
		if (g.inputs[0] == o || on_a == on_b) break;
		c.push_back({g.inputs[0], on_a});
		break;
	}
	default: break;
	}
	return c;
}

NcClause edge_block(const Netlist& n, GateId from, GateId to, NcCondition cond) {
	if (cond == NcCondition::Sensitizable) return ns(n, from, to);
	auto l = bk(n, from, to);
	return l ? NcClause{*l} : NcClause{};
}

static bool normalize(NcClause& c) {
	std::sort(c.begin(), c.end());
	c.erase(std::unique(c.begin(), c.end()), c.end());
	for (std::size_t i = 0; i + 1 < c.size(); ++i)
		if (c[i].net == c[i + 1].net) return false; // x=0 or x=1
	return true;
}

void add_nc_clause(NcClauseSet& s, NcClause c, std::string provenance) {
	if (!normalize(c)) return;
	if (c.empty()) ++s.hard;
	s.clauses.push_back(std::move(c));
	s.provenance.push_back(std::move(provenance));
}

static void dedupe(NcClauseSet& s) {
	std::vector<std::size_t> idx(s.clauses.size());
	for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
	std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.clauses[a] < s.clauses[b]; });
	NcClauseSet out;
	out.truncated = s.truncated;
	out.cycles_seen = s.cycles_seen;
	for (std::size_t k = 0; k < idx.size(); ++k) {
		if (k && s.clauses[idx[k]] == s.clauses[idx[k - 1]]) continue;
		if (s.clauses[idx[k]].empty()) ++out.hard;
		out.clauses.push_back(s.clauses[idx[k]]);
		out.provenance.push_back(s.provenance[idx[k]]);
	}
	s = std::move(out);
}

static void mark_signals(const Netlist& n, NcClauseSet& s) {
	s.uses_signals = false;
	for (const auto& c : s.clauses)
		for (const auto& l : c)
			if (!n.is_key(l.net)) s.uses_signals = true;
}

NcClause nc_cycle(const Netlist& n, const Cycle& c, NcCondition cond) {
	NcClause out;
	for (std::size_t i = 0; i < c.size(); ++i) {
		auto b = edge_block(n, c[i], c[(i + 1) % c.size()], cond);
		out.insert(out.end(), b.begin(), b.end());
	}
	normalize(out);
	return out;
}

NcClause nc_structural_cycle(const Netlist& n, const Cycle& c) { return nc_cycle(n, c, NcCondition::Structural); }

static std::string cycle_name(const Netlist& n, const Cycle& c) {
	std::string s;
	for (GateId g : c) s += (s.empty() ? "" : ">") + n.net(n.gate(g).output).name;
	return s;
}

NcClauseSet nc_feedback(const Netlist& n, const Edge& fb, NcCondition cond, Traversal rule, Deadline deadline) {
	NcClauseSet out;
	std::string prov = "feedback " + n.net(n.gate(fb.from).output).name + "->" + n.net(n.gate(fb.to).output).name;
	NcClause base = edge_block(n, fb.from, fb.to, cond);
	if (fb.from == fb.to) {
		add_nc_clause(out, base, prov);
		return out;
	}
	auto succ = n.successors();
	std::size_t G = n.num_gates();
	std::uint64_t steps = 0;

	if (rule == Traversal::PerFeedbackRuleII) {
		// conjunction over all simple paths to -> ... -> from
		auto pred = n.predecessors();
		std::vector<char> reach(G, 0);
		std::vector<GateId> st{fb.from};
		reach[fb.from] = 1;
		while (!st.empty()) {
			GateId v = st.back();
			st.pop_back();
			for (GateId p : pred[v])
				if (!reach[p]) reach[p] = 1, st.push_back(p);
		}
		if (!reach[fb.to]) return out;
		std::set<NcClause> seen;
		std::vector<char> on_path(G, 0);
		struct Frame {
			GateId v;
			std::size_t i;
			std::size_t lits;
		};
		NcClause acc = base;
		std::vector<Frame> stack{{fb.to, 0, acc.size()}};
		on_path[fb.to] = 1;
		while (!stack.empty()) {
			if ((++steps & 4095) == 0 && deadline.expired()) {
				out.truncated = true;
				break;
			}
			Frame& f = stack.back();
			if (f.i < succ[f.v].size()) {
				GateId w = succ[f.v][f.i++];
				if (!reach[w] || on_path[w]) continue;
				auto b = edge_block(n, f.v, w, cond);
				if (w == fb.from) {
					NcClause c = acc;
					c.insert(c.end(), b.begin(), b.end());
					if (normalize(c) && seen.insert(c).second) add_nc_clause(out, c, prov);
					continue;
				}
				std::size_t mark = acc.size();
				acc.insert(acc.end(), b.begin(), b.end());
				on_path[w] = 1;
				stack.push_back({w, 0, mark});
				continue;
			}
			on_path[f.v] = 0;
			acc.resize(f.lits);
			stack.pop_back();
		}
		return out;
	}

	// rule (i): other feedback edges cut, memoized recursion over the acyclic skeleton
	auto fbs = find_feedback_set(n);
	std::set<Edge> cut(fbs.begin(), fbs.end());
	auto order = topo_order(n, cut);
	if (!order) return out;
	std::vector<char> reach(G, 0);
	reach[fb.to] = 1;
	std::vector<std::set<NcClause>> F(G);
	F[fb.to].insert(base);
	std::vector<std::size_t> pos(G);
	for (std::size_t i = 0; i < order->size(); ++i) pos[(*order)[i]] = i;
	for (std::size_t k = pos[fb.to]; k < order->size(); ++k) {
		GateId j = (*order)[k];
		if (!reach[j]) continue;
		if (deadline.expired()) {
			out.truncated = true;
			return out;
		}
		for (GateId s : succ[j]) {
			if (cut.count({j, s})) continue;
			reach[s] = 1;
			auto b = edge_block(n, j, s, cond);
			for (const auto& c : F[j]) {
				NcClause d = c;
				d.insert(d.end(), b.begin(), b.end());
				if (normalize(d)) F[s].insert(std::move(d));
			}
		}
		if (j == fb.from) break;
	}
	if (reach[fb.from])
		for (const auto& c : F[fb.from]) add_nc_clause(out, c, prov);
	return out;
}

NcClauseSet nc_structural_feedback(const Netlist& n, const Edge& fb, Traversal rule) {
	return nc_feedback(n, fb, NcCondition::Structural, rule);
}

NcClauseSet build_nc(const Netlist& n, NcCondition cond, Traversal t, Deadline deadline, std::uint64_t max_cycles) {
	NcClauseSet out;
	if (t == Traversal::PerCycle) {
		bool done = for_each_cycle(
		    n,
		    [&](const Cycle& c) {
			    if (out.cycles_seen >= max_cycles) return false;
			    ++out.cycles_seen;
			    add_nc_clause(out, nc_cycle(n, c, cond), "cycle " + cycle_name(n, c));
			    return true;
		    },
		    deadline);
		out.truncated = !done;
	} else {
		for (const Edge& e : find_feedback_set(n)) {
			auto part = nc_feedback(n, e, cond, t, deadline);
			for (std::size_t i = 0; i < part.clauses.size(); ++i) add_nc_clause(out, part.clauses[i], part.provenance[i]);
			if (part.truncated || deadline.expired()) {
				out.truncated = true;
				break;
			}
		}
	}
	dedupe(out);
	mark_signals(n, out);
	return out;
}

NcClauseSet nc_sensitizable(const Netlist& n, Traversal t, Deadline deadline) {
	return build_nc(n, NcCondition::Sensitizable, t, deadline);
}

void encode_nc(ClauseSink& sink, const NcClauseSet& nc, const std::vector<int>& lit) {
	std::vector<int> c;
	for (const auto& cl : nc.clauses) {
		c.clear();
		for (const auto& l : cl) c.push_back(l.value ? lit[l.net] : -lit[l.net]);
		sink.add(c);
	}
}

CnfFormula nc_key_cnf(const Netlist& n, const NcClauseSet& nc) {
	CnfFormula f;
	auto keys = n.key_inputs();
	std::vector<int> lit(n.num_nets(), 0);
	for (std::size_t i = 0; i < keys.size(); ++i) lit[keys[i]] = static_cast<int>(i + 1);
	f.num_vars = static_cast<int>(keys.size());
	for (const auto& cl : nc.clauses)
		for (const auto& l : cl)
			if (!lit[l.net]) throw std::invalid_argument("NC clause references a signal, not only keys");
	encode_nc(f, nc, lit);
	return f;
}

// ---------------------------------------------------------------- combinationality

bool is_comb_cycle(const Netlist& sub, NetId r, NetId r_prime) {
	CnfFormula f;
	auto lit = encode_netlist(f, sub);
	int d = encode_xor(f, lit[r], lit[r_prime]);
	f.add({d});
	return solve(f).status == SatStatus::Unsat;
}

std::vector<NetLit> cycle_closed_lits(const Netlist& n, const Cycle& c) {
	std::vector<NetLit> out;
	for (std::size_t i = 0; i < c.size(); ++i)
		if (auto b = bk(n, c[i], c[(i + 1) % c.size()])) out.push_back({b->net, !b->value});
	return out;
}

bool cycle_open_under(const Netlist& n, const Cycle& c, const KeyAssignment& key) {
	for (std::size_t i = 0; i < c.size(); ++i)
		if (auto b = bk(n, c[i], c[(i + 1) % c.size()])) {
			auto it = key.find(n.net(b->net).name);
			if (it != key.end() && it->second == b->value) return true;
		}
	return false;
}

bool cycles_combinational(const Netlist& n, const std::vector<Cycle>& closed) {
	std::set<GateId> S;
	std::map<NetId, bool> forced;
	for (const auto& c : closed) {
		S.insert(c.begin(), c.end());
		for (const auto& l : cycle_closed_lits(n, c)) {
			auto [it, fresh] = forced.emplace(l.net, l.value);
			if (!fresh && it->second != l.value) return false;
		}
	}
	std::set<NetId> internal;
	for (GateId g : S) internal.insert(n.gate(g).output);
	std::vector<NetId> free_nets;
	{
		std::set<NetId> ext;
		for (GateId g : S)
			for (NetId in : n.gate(g).inputs)
				if (!internal.count(in) && !forced.count(in)) ext.insert(in);
		free_nets.assign(ext.begin(), ext.end());
	}
	std::vector<GateId> gates(S.begin(), S.end());

	auto unique_fixpoint = [&](const std::map<NetId, bool>& vals) {
		std::map<NetId, Tri> v;
		for (auto [k, b] : vals) v[k] = tri(b);
		for (NetId o : internal) v[o] = Tri::X;
		bool changed = true;
		std::vector<Tri> in;
		while (changed) {
			changed = false;
			for (GateId g : gates) {
				const Gate& gt = n.gate(g);
				in.clear();
				for (NetId x : gt.inputs) in.push_back(v.at(x));
				Tri r = eval_tri(gt.func, in.data(), in.size());
				if (r != v[gt.output]) v[gt.output] = r, changed = true;
			}
		}
		bool all = true;
		for (NetId o : internal) all &= v[o] != Tri::X;
		if (all) return true;
		Solver s;
		SolverSink sink(s);
		int t = sink.true_lit();
		std::map<NetId, int> lit;
		for (auto& [k, x] : v) lit[k] = x == Tri::X ? sink.new_var() : (x == Tri::One ? t : -t);
		std::vector<int> ins;
		for (GateId g : gates) {
			const Gate& gt = n.gate(g);
			if (v[gt.output] != Tri::X) continue;
			ins.clear();
			for (NetId x : gt.inputs) ins.push_back(lit[x]);
			encode_gate(sink, gt.func, lit[gt.output], ins);
		}
		if (s.solve() != SatStatus::Sat) return false;
		std::vector<int> block;
		for (auto& [k, x] : v)
			if (x == Tri::X) block.push_back(s.lit_value(lit[k]) ? -lit[k] : lit[k]);
		s.add_clause(block);
		return s.solve() == SatStatus::Unsat;
	};

	std::map<NetId, bool> vals(forced);
	if (free_nets.size() <= 16) {
		for (std::uint64_t m = 0; m < (1ull << free_nets.size()); ++m) {
			for (std::size_t i = 0; i < free_nets.size(); ++i) vals[free_nets[i]] = (m >> i) & 1;
			if (!unique_fixpoint(vals)) return false;
		}
		return true;
	}
	std::mt19937_64 rng(0x5eed);
	for (int t = 0; t < 4096; ++t) {
		for (NetId x : free_nets) vals[x] = rng() & 1;
		if (!unique_fixpoint(vals)) return false;
	}
	return true;
}

RcClauseSet reduction_attack_clauses(const Netlist& n, Deadline deadline) {
	RcClauseSet rc;
	auto cs = enumerate_cycles(n, kUnbounded, deadline);
	if (cs.truncated) {
		rc.truncated = true;
		return rc;
	}
	auto cycles = cs.cycles;
	std::stable_sort(cycles.begin(), cycles.end(), [](const Cycle& a, const Cycle& b) {
		return a.size() != b.size() ? a.size() < b.size() : a < b;
	});
	rc.cycles = cycles;
	std::size_t m = cycles.size();
	std::vector<std::vector<std::vector<NetLit>>> terms(m);
	std::vector<char> noncomb(m, 0);
	std::vector<std::set<GateId>> sets(m);
	for (std::size_t i = 0; i < m; ++i) sets[i] = std::set<GateId>(cycles[i].begin(), cycles[i].end());
	for (std::size_t i = 0; i < m; ++i) {
		if (deadline.expired()) {
			rc.truncated = true;
			rc.entries.clear();
			return rc;
		}
		if (cycles_combinational(n, {cycles[i]})) continue;
		noncomb[i] = 1;
		auto ci = cycle_closed_lits(n, cycles[i]);
		for (std::size_t j = i + 1; j < m; ++j) {
			bool shares = false;
			for (GateId g : cycles[j])
				if (sets[i].count(g)) {
					shares = true;
					break;
				}
			if (!shares || !cycles_combinational(n, {cycles[i], cycles[j]})) continue;
			auto term = ci;
			auto cj = cycle_closed_lits(n, cycles[j]);
			term.insert(term.end(), cj.begin(), cj.end());
			std::sort(term.begin(), term.end());
			term.erase(std::unique(term.begin(), term.end()), term.end());
			terms[i].push_back(term);
			terms[j].push_back(term);
		}
	}
	for (std::size_t i = 0; i < m; ++i) {
		if (!noncomb[i]) continue;
		rc.entries.push_back({i, nc_structural_cycle(n, cycles[i]), terms[i]});
	}
	return rc;
}

void encode_rc(ClauseSink& sink, const RcClauseSet& rc, const std::vector<int>& lit) {
	auto to_lit = [&](const NetLit& l) { return l.value ? lit[l.net] : -lit[l.net]; };
	for (const auto& e : rc.entries) {
		std::vector<int> c;
		for (const auto& l : e.opened) c.push_back(to_lit(l));
		for (const auto& t : e.closed_terms) {
			std::vector<int> conj;
			for (const auto& l : t) conj.push_back(to_lit(l));
			c.push_back(encode_and(sink, conj));
		}
		sink.add(c);
	}
}

boost::multiprecision::cpp_int lfn_lower_bound(unsigned m) {
	using boost::multiprecision::cpp_int;
	cpp_int sum = 0, binom = 1, fact = 1; // C(m,l), (l-1)!
	for (unsigned l = 1; l <= m; ++l) {
		binom = binom * (m - l + 1) / l;
		if (l > 1) fact *= (l - 1);
		sum += binom * fact;
	}
	return sum;
}

} // namespace cyclock
