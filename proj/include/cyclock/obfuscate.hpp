#pragma once

#include "cyclock/netlist.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cyclock {

enum class Method { SC, LFN, SRLatch, Template, Composite };
const char* to_string(Method m);
std::optional<Method> method_from_name(const std::string& s);

/// Netlist too small for the requested construction.
class NiSError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

struct ObfuscationConfig {
	Method method = Method::SC;
	unsigned n = 2;          // MC count, or LFN path count (power of two)
	unsigned mc_length = 7;
	unsigned sr_count = 1;
	unsigned extra_edges = 2; // cross edges per MC
	std::uint64_t seed = 1;
	std::optional<double> slack_budget_percent;
	bool saturate = false;    // timing-aware: insert until no candidate remains
	std::vector<ObfuscationConfig> steps; // Composite only

	void check() const;
};

struct ObfuscationReport {
	std::string method;
	std::uint64_t seed = 0;
	KeyAssignment key;
	std::size_t m = 0;            // inserted feedbacks
	std::size_t muxes = 0;
	std::size_t added_gates = 0;
	std::size_t original_gates = 0;
	double overhead_pct = 0;
	std::string cycle_lower_bound = "0";
	std::size_t latches = 0;
	std::size_t templates = 0;
	std::vector<std::string> notes;

	void finalize(const Netlist& before, const Netlist& after);
	/// Appends another step's report (composite).
	void merge(const ObfuscationReport& r);
};

struct Locked {
	Netlist netlist;
	ObfuscationReport report;
};

/// Rewires every consumer of `victim` (pins and POs) onto a new key mux; `correct_bit` selects victim.
NetId insert_mux(Netlist& n, NetId victim, NetId alt, const std::string& key_name, bool correct_bit,
                 ObfuscationReport* rep = nullptr);
/// Key mux on a single gate pin. Returns the mux gate.
GateId insert_pin_mux(Netlist& n, GateId g, std::size_t pin, NetId alt, bool correct_bit, ObfuscationReport* rep = nullptr);

/// Longest chain of unmarked non-mux gates, each feeding the next, inside one PO's fanin cone.
/// POs are tried by decreasing cone size. Empty when no chain of `len` exists.
std::vector<GateId> select_path(const Netlist& n, std::size_t len);

/// Feedback from the path end into key muxes at the path start and its midpoint.
/// Returns the mux gates, one per path gate, positioned before each gate.
std::vector<GateId> build_micro_cycle(Netlist& n, const std::vector<GateId>& path, std::uint64_t seed,
                                      ObfuscationReport& rep);

Locked build_super_cycle(const Netlist& n, const ObfuscationConfig& c);
Locked build_lfn(const Netlist& n, const ObfuscationConfig& c);

struct ComboVerdict {
	bool occurs = false;
	std::vector<bool> witness; // primary inputs, when it occurs
};
/// SAT check whether nets can take `pattern` simultaneously (keys free unless fixed in `key`).
ComboVerdict find_nonoccurring_combo(const Netlist& n, const std::vector<NetId>& nets, const std::vector<bool>& pattern,
                                     const KeyAssignment& key = {});

/// `current` is the correct key of earlier locking steps, used to keep the SAT probes exact.
Locked sr_latch_cyclify(const Netlist& n, unsigned count, std::uint64_t seed, const KeyAssignment& current = {});

/// Function index of a 3-input truth table among the template outputs, or -1.
struct TemplateMatch {
	GateId root;
	std::vector<NetId> leaves; // 3 cut leaves in template order
	int output;                // template gate 0..5
	bool complement;
};
std::vector<TemplateMatch> find_template_matches(const Netlist& n);
/// Appends the 6-gate cyclic template over (x1,x2,x3). Returns its 6 output nets.
std::vector<NetId> add_rivest_template(Netlist& n, NetId x1, NetId x2, NetId x3, const std::string& prefix);
Locked rivest_template_insert(const Netlist& n, std::uint64_t seed, unsigned count = 1);

Locked obfuscate(const Netlist& n, const ObfuscationConfig& c);
Locked compose(const Netlist& n, const std::vector<ObfuscationConfig>& steps);

} // namespace cyclock
