#pragma once

#include "cyclock/deadline.hpp"
#include "cyclock/netlist.hpp"
#include "cyclock/solver.hpp"

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cyclock {

/// Anything clauses can be streamed into.
class ClauseSink {
public:
	virtual ~ClauseSink() = default;
	virtual int new_var() = 0;
	virtual void add(const std::vector<int>& clause) = 0;
	/// Literal fixed to true (allocated on first use).
	int true_lit();

private:
	int true_var_ = 0;
};

struct CnfFormula : ClauseSink {
	int num_vars = 0;
	std::vector<std::vector<int>> clauses;
	std::map<std::pair<std::string, NetId>, int> bindings;

	int new_var() override { return ++num_vars; }
	/// Drops duplicate literals; tautologies are discarded.
	void add(const std::vector<int>& clause) override;
};

class SolverSink : public ClauseSink {
public:
	explicit SolverSink(Solver& s) : s_(s) {}
	int new_var() override { return s_.new_var(); }
	void add(const std::vector<int>& clause) override { s_.add_clause(clause); }

private:
	Solver& s_;
};

/// Clauses for out <-> func(ins); literals may be negative.
void encode_gate(ClauseSink& sink, GateFunc f, int out, const std::vector<int>& ins);

/// Encodes every gate of n; `shared` maps nets to existing literals. Returns a literal per net.
std::vector<int> encode_netlist(ClauseSink& sink, const Netlist& n, const std::unordered_map<NetId, int>& shared = {});

/// Fresh formula with bindings under `tag`.
CnfFormula tseitin(const Netlist& n, const std::string& tag, const std::unordered_map<NetId, int>& shared = {});
void tseitin_into(CnfFormula& f, const Netlist& n, const std::string& tag, const std::unordered_map<NetId, int>& shared = {});

/// Fresh d with d <-> (a xor b).
int encode_xor(ClauseSink& sink, int a, int b);
/// Fresh d with d <-> OR(lits) (false literal for empty input).
int encode_or(ClauseSink& sink, const std::vector<int>& lits);
int encode_and(ClauseSink& sink, const std::vector<int>& lits);

struct Miter {
	CnfFormula cnf;
	std::vector<int> x, k1, k2, y1, y2;
};

/// C(X,K1,Y1) and C(X,K2,Y2) with Y1 != Y2.
Miter build_miter(const Netlist& locked);

struct SatOutcome {
	SatStatus status = SatStatus::Aborted;
	std::vector<bool> model; // index v-1
	bool value(int var) const { return model.at(static_cast<std::size_t>(var - 1)); }
};

/// Solves with the embedded solver, or with $CYCLOCK_SAT_CMD when set and use_external is true.
SatOutcome solve(const CnfFormula& f, const std::vector<int>& assumptions = {}, Deadline deadline = Deadline::never(),
                 bool use_external = false);
bool model_satisfies(const CnfFormula& f, const std::vector<bool>& model);

std::string export_dimacs(const CnfFormula& f);
CnfFormula parse_dimacs(const std::string& text);
/// Parses solver output (`s`/`v` lines, or a minisat-style result file).
SatOutcome import_model(const std::string& text, int num_vars);
/// Runs an external solver; `{in}` and `{out}` in the template are replaced by file paths.
SatOutcome solve_external(const CnfFormula& f, const std::string& cmd_template, Deadline deadline = Deadline::never());

} // namespace cyclock
