#include "cyclock/timing.hpp"

#include "cyclock/graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <limits>
#include <random>
#include <set>

namespace cyclock {

double DelayModel::of(GateFunc f) const {
	if (f == GateFunc::Mux) return mux;
	auto it = delay.find(f);
	return it == delay.end() ? unit : it->second;
}

DelayModel DelayModel::from_json(const std::string& text) {
	auto j = nlohmann::json::parse(text);
	DelayModel d;
	if (j.contains("unit")) d.unit = j["unit"].get<double>();
	if (j.contains("mux")) d.mux = j["mux"].get<double>();
	if (j.contains("gates"))
		for (auto& [k, v] : j["gates"].items()) {
			auto f = func_from_name(k);
			if (!f) throw std::invalid_argument("unknown gate type in delay model: " + k);
			if (*f == GateFunc::Mux)
				d.mux = v.get<double>();
			else
				d.delay[*f] = v.get<double>();
		}
	auto bad = [](double x) { return !(x >= 0); };
	if (bad(d.unit) || bad(d.mux)) throw std::invalid_argument("negative delay");
	for (auto& [f, v] : d.delay)
		if (bad(v)) throw std::invalid_argument("negative delay");
	return d;
}

std::string DelayModel::to_json() const {
	nlohmann::json j;
	j["schema"] = 1;
	j["unit"] = unit;
	j["mux"] = mux;
	j["gates"] = nlohmann::json::object();
	for (auto& [f, v] : delay) j["gates"][func_name(f)] = v;
	return j.dump();
}

TimingReport sta(const Netlist& n, const DelayModel& d, std::optional<double> deadline, const KeyAssignment& key) {
	std::size_t G = n.num_gates(), N = n.num_nets();
	// active[g][pin]
	std::vector<std::vector<char>> active(G);
	for (GateId g = 0; g < G; ++g) {
		const Gate& gt = n.gate(g);
		active[g].assign(gt.inputs.size(), 1);
		if (!key.empty() && n.is_key_mux(g)) {
			auto it = key.find(n.net(gt.inputs[0]).name);
			if (it != key.end()) active[g][it->second ? 1 : 2] = 0;
		}
	}
	std::vector<std::vector<GateId>> succ(G);
	for (GateId g = 0; g < G; ++g)
		for (std::size_t p = 0; p < n.gate(g).inputs.size(); ++p) {
			GateId dr = n.driver(n.gate(g).inputs[p]);
			if (active[g][p] && dr != kNone) succ[dr].push_back(g);
		}
	for (auto& s : succ) {
		std::sort(s.begin(), s.end());
		s.erase(std::unique(s.begin(), s.end()), s.end());
	}
	// DFS back edges on the active graph
	std::set<Edge> cut;
	{
		std::vector<char> state(G, 0);
		for (GateId r = 0; r < G; ++r) {
			if (state[r]) continue;
			std::vector<std::pair<GateId, std::size_t>> st{{r, 0}};
			state[r] = 1;
			while (!st.empty()) {
				auto& [v, i] = st.back();
				if (i < succ[v].size()) {
					GateId w = succ[v][i++];
					if (state[w] == 1)
						cut.insert({v, w});
					else if (!state[w]) {
						state[w] = 1;
						st.push_back({w, 0});
					}
					continue;
				}
				state[v] = 2;
				st.pop_back();
			}
		}
	}
	auto live = [&](GateId g, std::size_t p) {
		if (!active[g][p]) return false;
		GateId dr = n.driver(n.gate(g).inputs[p]);
		return dr == kNone || !cut.count({dr, g});
	};
	std::vector<int> indeg(G, 0);
	for (GateId g = 0; g < G; ++g)
		for (GateId s : succ[g])
			if (!cut.count({g, s})) ++indeg[s];
	std::vector<GateId> order;
	std::deque<GateId> q;
	for (GateId g = 0; g < G; ++g)
		if (!indeg[g]) q.push_back(g);
	while (!q.empty()) {
		GateId g = q.front();
		q.pop_front();
		order.push_back(g);
		for (GateId s : succ[g])
			if (!cut.count({g, s}) && --indeg[s] == 0) q.push_back(s);
	}

	TimingReport t;
	t.arrival.assign(N, 0.0);
	for (GateId g : order) {
		const Gate& gt = n.gate(g);
		double a = 0;
		for (std::size_t p = 0; p < gt.inputs.size(); ++p)
			if (live(g, p)) a = std::max(a, t.arrival[gt.inputs[p]]);
		t.arrival[gt.output] = a + d.of(gt.func);
	}
	for (NetId o : n.outputs()) t.critical = std::max(t.critical, t.arrival[o]);
	double T = deadline.value_or(t.critical);
	t.required.assign(N, T);
	for (auto it = order.rbegin(); it != order.rend(); ++it) {
		const Gate& gt = n.gate(*it);
		double r = t.required[gt.output] - d.of(gt.func);
		for (std::size_t p = 0; p < gt.inputs.size(); ++p)
			if (live(*it, p)) t.required[gt.inputs[p]] = std::min(t.required[gt.inputs[p]], r);
	}
	t.slack.resize(N);
	for (NetId i = 0; i < N; ++i) t.slack[i] = t.required[i] - t.arrival[i];
	return t;
}

std::string timing_json(const Netlist& n, const TimingReport& t) {
	nlohmann::json j;
	j["schema"] = 1;
	j["critical_path"] = t.critical;
	auto& nets = j["nets"] = nlohmann::json::array();
	for (NetId i = 0; i < n.num_nets(); ++i)
		nets.push_back({{"name", n.net(i).name}, {"arrival", t.arrival[i]}, {"required", t.required[i]}, {"slack", t.slack[i]}});
	return j.dump();
}

Locked timing_aware_obfuscate(const Netlist& orig, const ObfuscationConfig& c, const DelayModel& d) {
	Locked out{orig, {}};
	auto& rep = out.report;
	rep.method = "sc-timing";
	rep.seed = c.seed;
	double budget = c.slack_budget_percent.value_or(0.0) / 100.0;
	double d0 = sta(orig, d).critical;
	double limit = d0 * (1.0 + budget);
	const double eps = 1e-9;
	std::mt19937_64 rng(c.seed);
	std::size_t len = c.mc_length;

	// output port with the largest cone, then BFS over its fanin
	std::size_t best = 0, best_sz = 0;
	for (std::size_t i = 0; i < orig.outputs().size(); ++i) {
		std::size_t s = fanin_cone(orig, orig.outputs()[i]).size();
		if (s > best_sz) best = i, best_sz = s;
	}
	if (orig.outputs().empty()) return out;
	std::vector<GateId> bfs;
	{
		std::vector<char> seen(orig.num_gates(), 0);
		std::deque<NetId> q{orig.outputs()[best]};
		while (!q.empty()) {
			NetId x = q.front();
			q.pop_front();
			GateId g = orig.driver(x);
			if (g == kNone || seen[g]) continue;
			seen[g] = 1;
			bfs.push_back(g);
			for (NetId in : orig.gate(g).inputs) q.push_back(in);
		}
	}

	std::size_t target = c.saturate ? std::numeric_limits<std::size_t>::max() : c.n;
	std::size_t inserted = 0;
	for (GateId tail : bfs) {
		if (inserted >= target) break;
		Netlist& n = out.netlist;
		if (n.marked(tail) || n.gate(tail).func == GateFunc::Mux) continue;
		auto t = sta(n, d, limit, rep.key);
		if (t.slack[n.gate(tail).output] <= d.mux) continue;
		// walk backward through unmarked gates, preferring slack
		std::vector<GateId> path{tail};
		std::vector<std::size_t> pins;
		while (path.size() < len) {
			GateId h = path.back();
			GateId pick = kNone;
			std::size_t pick_pin = 0;
			for (std::size_t p = 0; p < n.gate(h).inputs.size(); ++p) {
				GateId dr = n.driver(n.gate(h).inputs[p]);
				if (dr == kNone || n.marked(dr) || n.gate(dr).func == GateFunc::Mux) continue;
				if (std::find(path.begin(), path.end(), dr) != path.end()) continue;
				if (pick == kNone || t.slack[n.gate(dr).output] > t.slack[n.gate(pick).output]) pick = dr, pick_pin = p;
			}
			if (pick == kNone) break;
			pins.push_back(pick_pin);
			path.push_back(pick);
		}
		if (path.size() < len) continue;
		std::reverse(path.begin(), path.end());
		std::reverse(pins.begin(), pins.end()); // pins[i]: pin of path[i+1] fed by path[i]
		std::size_t mid = len / 2;
		GateId head = path[0], midg = path[mid];
		std::size_t head_pin = 0;
		std::size_t mid_pin = pins[mid - 1];
		if (t.slack[n.gate(head).inputs[head_pin]] <= d.mux || t.slack[n.gate(midg).inputs[mid_pin]] <= d.mux) continue;

		Locked backup = out;
		NetId fb = n.gate(tail).output;
		insert_pin_mux(n, head, head_pin, fb, rng() & 1, &rep);
		insert_pin_mux(n, midg, mid_pin, fb, rng() & 1, &rep);
		double after = sta(n, d, std::nullopt, rep.key).critical;
		if (after > limit + eps) {
			out = std::move(backup);
			continue;
		}
		for (GateId g : path) n.mark(g);
		++inserted;
	}
	rep.m = inserted;
	rep.cycle_lower_bound = std::to_string(inserted);
	rep.notes.push_back("critical path " + std::to_string(d0) + " -> " + std::to_string(sta(out.netlist, d, std::nullopt, rep.key).critical));
	rep.finalize(orig, out.netlist);
	return out;
}

} // namespace cyclock
