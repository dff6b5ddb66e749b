#pragma once

#include "cyclock/cnf.hpp"
#include "cyclock/deadline.hpp"
#include "cyclock/graph.hpp"
#include "cyclock/netlist.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace cyclock {

/// Gate sequence; edges run g[i] -> g[i+1] and back to g[0], which is the smallest id.
using Cycle = std::vector<GateId>;

struct CycleSet {
	std::vector<Cycle> cycles;
	bool truncated = false;
	std::uint64_t count = 0;
	std::map<std::size_t, std::uint64_t> histogram;
};

inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

/// Johnson's elementary-circuit enumeration restricted to nontrivial SCCs.
CycleSet enumerate_cycles(const Netlist& n, std::uint64_t max_count = kUnbounded, Deadline deadline = Deadline::never(),
                          bool store = true);
/// Streams cycles; visitor returns false to stop. Returns false when stopped early or out of time.
bool for_each_cycle(const Netlist& n, const std::function<bool(const Cycle&)>& visit, Deadline deadline = Deadline::never());

/// Literal "net == value".
struct NetLit {
	NetId net;
	bool value;
	auto operator<=>(const NetLit&) const = default;
};
/// Disjunction of NetLits; empty means false.
using NcClause = std::vector<NetLit>;

enum class NcCondition { Structural, Sensitizable };
enum class Traversal { PerFeedbackRuleI, PerFeedbackRuleII, PerCycle };

const char* to_string(NcCondition c);
const char* to_string(Traversal t);

/// bk(l,j): key literal that steers key mux `to` away from out(from).
std::optional<NetLit> bk(const Netlist& n, GateId from, GateId to);
/// ns(l,j): disjunction of conditions that block propagation from out(from) through `to`.
NcClause ns(const Netlist& n, GateId from, GateId to);
NcClause edge_block(const Netlist& n, GateId from, GateId to, NcCondition c);

struct NcClauseSet {
	std::vector<NcClause> clauses;
	std::vector<std::string> provenance;
	std::size_t hard = 0; // clauses that are empty (unbreakable cycles)
	bool truncated = false;
	bool uses_signals = false; // some literal is not a key input
	std::uint64_t cycles_seen = 0;
};

/// Adds a clause after sorting, deduplicating and dropping tautologies.
void add_nc_clause(NcClauseSet& s, NcClause c, std::string provenance = {});

NcClause nc_cycle(const Netlist& n, const Cycle& c, NcCondition cond);
NcClause nc_structural_cycle(const Netlist& n, const Cycle& c);

/// NC for one feedback edge; rule (i) cuts the other feedbacks, rule (ii) walks every simple path.
NcClauseSet nc_feedback(const Netlist& n, const Edge& fb, NcCondition cond, Traversal rule,
                        Deadline deadline = Deadline::never());
NcClauseSet nc_structural_feedback(const Netlist& n, const Edge& fb, Traversal rule = Traversal::PerFeedbackRuleII);

/// Full NC for the netlist under the given traversal. Deadline hits set `truncated`.
NcClauseSet build_nc(const Netlist& n, NcCondition cond, Traversal t, Deadline deadline = Deadline::never(),
                     std::uint64_t max_cycles = kUnbounded);
NcClauseSet nc_sensitizable(const Netlist& n, Traversal t, Deadline deadline = Deadline::never());

/// Adds the clauses with each net mapped through `lit` (the net -> literal map of one circuit copy).
void encode_nc(ClauseSink& sink, const NcClauseSet& nc, const std::vector<int>& lit);
/// Key-only NC as a CNF over key variables 1..K (key_inputs() order). Fails if a signal literal is present.
CnfFormula nc_key_cnf(const Netlist& n, const NcClauseSet& nc);

/// Literal IS_COMB_CYCLE: UNSAT(S and r != r') on the given sub-circuit.
bool is_comb_cycle(const Netlist& sub, NetId r, NetId r_prime);
/// Exact check used by the reduction attack: with the listed cycles closed, the sub-circuit made of their gates has exactly
/// one binary fixpoint for every assignment of its external inputs.
bool cycles_combinational(const Netlist& n, const std::vector<Cycle>& closed);

/// closed(c): every guarding key mux selects the cycle edge.
std::vector<NetLit> cycle_closed_lits(const Netlist& n, const Cycle& c);
/// True when some guarding mux on the cycle is steered off it by `key`.
bool cycle_open_under(const Netlist& n, const Cycle& c, const KeyAssignment& key);

struct RcEntry {
	std::size_t cycle;
	NcClause opened;
	std::vector<std::vector<NetLit>> closed_terms; // each a conjunction
};

struct RcClauseSet {
	std::vector<Cycle> cycles;
	std::vector<RcEntry> entries; // conjoined into RC(K)
	bool truncated = false;
};

/// Reduction-attack constraint. Refuses (truncated=true, no entries) when the cycle enumeration did not finish.
RcClauseSet reduction_attack_clauses(const Netlist& n, Deadline deadline = Deadline::never());
void encode_rc(ClauseSink& sink, const RcClauseSet& rc, const std::vector<int>& lit);

boost::multiprecision::cpp_int lfn_lower_bound(unsigned m);

} // namespace cyclock
