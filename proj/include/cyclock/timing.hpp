#pragma once

#include "cyclock/netlist.hpp"
#include "cyclock/obfuscate.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cyclock {

struct DelayModel {
	std::map<GateFunc, double> delay; // missing entries fall back to `unit`
	double unit = 1.0;
	double mux = 1.0;

	double of(GateFunc f) const;
	static DelayModel from_json(const std::string& text);
	std::string to_json() const;
};

struct TimingReport {
	std::vector<double> arrival, required, slack; // per net
	double critical = 0;
};

/// Longest-path STA with DFS feedback edges cut. `deadline` overrides the PO required time.
/// With a key, the unselected data pin of every key mux is ignored before cutting.
TimingReport sta(const Netlist& n, const DelayModel& d, std::optional<double> deadline = std::nullopt,
                 const KeyAssignment& key = {});
std::string timing_json(const Netlist& n, const TimingReport& t);

/// Switch insertion under a slack budget; rolls back any insertion that would stretch the critical path
/// beyond (1 + budget) times the original.
Locked timing_aware_obfuscate(const Netlist& n, const ObfuscationConfig& c, const DelayModel& d);

} // namespace cyclock
