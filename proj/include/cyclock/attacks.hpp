#pragma once

#include "cyclock/cycles.hpp"
#include "cyclock/netlist.hpp"
#include "cyclock/sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cyclock {

enum class AttackMode { Sat, CycSat, Reduction, BeSat };
enum class AttackStatus { KeyFound, Unsat, PreprocessTimeout, TrapDetected, Deadline };

const char* to_string(AttackMode m);
const char* to_string(AttackStatus s);
std::optional<AttackMode> attack_mode_from_name(const std::string& s);

struct AttackConfig {
	AttackMode mode = AttackMode::Sat;
	std::optional<NcCondition> nc; // unset: structural, or auto for BeSAT
	Traversal traversal = Traversal::PerCycle;
	double preprocess_timeout = 60;   // seconds
	double timeout = 300;             // seconds, whole attack
	double call_timeout = 0;          // seconds per solver call, 0 = none
	unsigned max_call_timeouts = 3;
	std::size_t max_iterations = 100000;
	std::uint64_t seed = 1;
	bool external_solver = false;     // route solver calls through $CYCLOCK_SAT_CMD
	/// Skip the final oracle check of the recovered key (used to observe raw behavior).
	bool skip_key_check = false;
};

struct AttackResult {
	AttackStatus status = AttackStatus::Deadline;
	std::optional<KeyAssignment> key;
	std::size_t dip_count = 0;
	std::vector<KeyAssignment> banned;
	double preprocess_seconds = 0;
	double solve_seconds = 0;
	std::uint64_t cycles = 0;
	bool cycles_truncated = false;
	std::size_t constraint_clauses = 0;
	std::string nc_condition;
	std::string trap_reason;
	std::vector<std::string> notes;
};

AttackResult sat_attack(const Netlist& locked, Oracle& oracle, const AttackConfig& c);
AttackResult cycsat_attack(const Netlist& locked, Oracle& oracle, const AttackConfig& c);
AttackResult reduction_attack(const Netlist& locked, Oracle& oracle, const AttackConfig& c);
AttackResult besat_attack(const Netlist& locked, Oracle& oracle, const AttackConfig& c);
AttackResult run_attack(const Netlist& locked, Oracle& oracle, const AttackConfig& c);

struct KeyVerdict {
	bool equivalent = false;
	bool stateful = false; // some input left the keyed circuit oscillating or indeterminate
	std::optional<Bits> witness;
	std::string method; // "exhaustive", "random", "random+sat"
};

/// Exhaustive for at most 16 primary inputs, otherwise 10^4 seeded random vectors plus a SAT miter when
/// both circuits are acyclic under the key.
KeyVerdict verify_key(const Netlist& original, const Netlist& locked, const KeyAssignment& key, std::uint64_t seed = 1);

} // namespace cyclock
