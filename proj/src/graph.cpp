#include "cyclock/graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>

namespace cyclock {

std::vector<GateId> fanin_cone(const Netlist& n, NetId net) {
	if (net >= n.num_nets()) throw NetlistError("unknown net");
	std::vector<char> seen(n.num_gates(), 0);
	std::vector<GateId> stack, out;
	if (GateId d = n.driver(net); d != kNone) stack.push_back(d);
	while (!stack.empty()) {
		GateId g = stack.back();
		stack.pop_back();
		if (seen[g]) continue;
		seen[g] = 1;
		out.push_back(g);
		for (NetId in : n.gate(g).inputs)
			if (GateId d = n.driver(in); d != kNone && !seen[d]) stack.push_back(d);
	}
	std::sort(out.begin(), out.end());
	return out;
}

std::vector<GateId> fanout_cone(const Netlist& n, NetId net) {
	if (net >= n.num_nets()) throw NetlistError("unknown net");
	auto fo = n.fanouts();
	std::vector<char> seen(n.num_gates(), 0);
	std::vector<GateId> stack(fo[net].begin(), fo[net].end()), out;
	while (!stack.empty()) {
		GateId g = stack.back();
		stack.pop_back();
		if (seen[g]) continue;
		seen[g] = 1;
		out.push_back(g);
		for (GateId s : fo[n.gate(g).output])
			if (!seen[s]) stack.push_back(s);
	}
	std::sort(out.begin(), out.end());
	return out;
}

FeedbackSet find_feedback_set(const Netlist& n) {
	auto succ = n.successors();
	std::size_t G = n.num_gates();
	std::vector<char> color(G, 0); // 0 white, 1 gray, 2 black
	FeedbackSet back;
	std::vector<std::pair<GateId, std::size_t>> stack;
	for (GateId root = 0; root < G; ++root) {
		if (color[root]) continue;
		stack.push_back({root, 0});
		color[root] = 1;
		while (!stack.empty()) {
			auto& [g, i] = stack.back();
			if (i < succ[g].size()) {
				GateId s = succ[g][i++];
				if (color[s] == 0) {
					color[s] = 1;
					stack.push_back({s, 0});
				} else if (color[s] == 1) {
					back.push_back({g, s});
				}
			} else {
				color[g] = 2;
				stack.pop_back();
			}
		}
	}
	std::sort(back.begin(), back.end());
	return back;
}

std::vector<std::vector<GateId>> scc(const Netlist& n) {
	auto succ = n.successors();
	std::size_t G = n.num_gates();
	std::vector<std::uint32_t> index(G, kNone), low(G, 0);
	std::vector<char> on_stack(G, 0);
	std::vector<GateId> st;
	std::vector<std::vector<GateId>> comps;
	std::uint32_t counter = 0;
	std::vector<std::pair<GateId, std::size_t>> call;
	for (GateId root = 0; root < G; ++root) {
		if (index[root] != kNone) continue;
		call.push_back({root, 0});
		index[root] = low[root] = counter++;
		st.push_back(root);
		on_stack[root] = 1;
		while (!call.empty()) {
			auto& [g, i] = call.back();
			if (i < succ[g].size()) {
				GateId s = succ[g][i++];
				if (index[s] == kNone) {
					index[s] = low[s] = counter++;
					st.push_back(s);
					on_stack[s] = 1;
					call.push_back({s, 0});
				} else if (on_stack[s]) {
					low[g] = std::min(low[g], index[s]);
				}
				continue;
			}
			GateId done = g;
			call.pop_back();
			if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
			if (low[done] != index[done]) continue;
			std::vector<GateId> comp;
			GateId w;
			do {
				w = st.back();
				st.pop_back();
				on_stack[w] = 0;
				comp.push_back(w);
			} while (w != done);
			bool self = std::binary_search(succ[done].begin(), succ[done].end(), done);
			if (comp.size() > 1 || self) {
				std::sort(comp.begin(), comp.end());
				comps.push_back(std::move(comp));
			}
		}
	}
	std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
	return comps;
}

std::optional<std::vector<GateId>> topo_order(const Netlist& n, const std::set<Edge>& cut) {
	auto succ = n.successors();
	std::size_t G = n.num_gates();
	std::vector<std::uint32_t> indeg(G, 0);
	for (GateId g = 0; g < G; ++g)
		for (GateId s : succ[g])
			if (!cut.count({g, s})) ++indeg[s];
	std::vector<GateId> ready, order;
	for (GateId g = G; g-- > 0;)
		if (indeg[g] == 0) ready.push_back(g);
	// smallest id first for determinism
	std::make_heap(ready.begin(), ready.end(), std::greater<>());
	while (!ready.empty()) {
		std::pop_heap(ready.begin(), ready.end(), std::greater<>());
		GateId g = ready.back();
		ready.pop_back();
		order.push_back(g);
		for (GateId s : succ[g]) {
			if (cut.count({g, s})) continue;
			if (--indeg[s] == 0) {
				ready.push_back(s);
				std::push_heap(ready.begin(), ready.end(), std::greater<>());
			}
		}
	}
	if (order.size() != G) return std::nullopt;
	return order;
}

bool is_acyclic(const Netlist& n) { return topo_order(n).has_value(); }

std::string dump_graph_json(const Netlist& n) {
	using nlohmann::json;
	json j;
	j["schema"] = 1;
	json nets = json::array();
	for (NetId i = 0; i < n.num_nets(); ++i) {
		const Net& x = n.net(i);
		const char* kind = x.kind == NetKind::PrimaryInput ? "pi" : x.kind == NetKind::KeyInput ? "key" : "internal";
		nets.push_back({{"id", i}, {"name", x.name}, {"kind", kind}});
	}
	json gates = json::array();
	for (GateId g = 0; g < n.num_gates(); ++g) {
		const Gate& x = n.gate(g);
		gates.push_back({{"id", g}, {"func", func_name(x.func)}, {"inputs", x.inputs}, {"output", x.output}});
	}
	j["nets"] = nets;
	j["gates"] = gates;
	j["outputs"] = n.outputs();
	json fb = json::array();
	for (const Edge& e : find_feedback_set(n)) fb.push_back({e.from, e.to});
	j["feedback"] = fb;
	return j.dump(1);
}

} // namespace cyclock
