#pragma once

#include "cyclock/netlist.hpp"

#include <set>
#include <string>
#include <vector>

namespace cyclock {

/// Gate-graph edge: out(from) feeds an input of `to`.
struct Edge {
	GateId from;
	GateId to;
	bool operator==(const Edge&) const = default;
	auto operator<=>(const Edge&) const = default;
};

using FeedbackSet = std::vector<Edge>;

/// Gates reachable backward from `net`, ascending.
std::vector<GateId> fanin_cone(const Netlist& n, NetId net);
/// Gates reachable forward from `net`, ascending.
std::vector<GateId> fanout_cone(const Netlist& n, NetId net);

/// DFS back edges; roots and children visited in ascending gate id.
FeedbackSet find_feedback_set(const Netlist& n);

/// Nontrivial strongly connected components (size > 1 or self loop), each sorted, ordered by first gate.
std::vector<std::vector<GateId>> scc(const Netlist& n);

/// Topological order of gates ignoring `cut` edges; empty optional when a cycle remains.
std::optional<std::vector<GateId>> topo_order(const Netlist& n, const std::set<Edge>& cut = {});

bool is_acyclic(const Netlist& n);

/// Gate-id-stable JSON dump of the graph.
std::string dump_graph_json(const Netlist& n);

} // namespace cyclock
