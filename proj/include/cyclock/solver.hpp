#pragma once

#include "cyclock/deadline.hpp"

#include <cstdint>
#include <vector>

namespace cyclock {

enum class SatStatus { Sat, Unsat, Aborted };

const char* to_string(SatStatus s);

/// Incremental CDCL solver over DIMACS-style literals (variables start at 1).
class Solver {
public:
	explicit Solver(std::uint64_t seed = 0);

	int new_var();
	/// Makes sure variables 1..n exist.
	void reserve_vars(int n);
	int num_vars() const { return static_cast<int>(assigns_.size()); }

	/// Returns false once the formula is known to be unsatisfiable at level 0.
	bool add_clause(const std::vector<int>& lits);

	SatStatus solve(const std::vector<int>& assumptions = {}, Deadline deadline = Deadline::never());

	/// Model value of a variable after Sat.
	bool value(int var) const { return model_[static_cast<std::size_t>(var - 1)]; }
	bool lit_value(int lit) const { return lit > 0 ? value(lit) : !value(-lit); }
	const std::vector<bool>& model() const { return model_; }

	std::uint64_t conflicts() const { return conflicts_; }
	std::uint64_t decisions() const { return decisions_; }
	std::size_t num_clauses() const { return num_original_; }

private:
	using Lit = std::uint32_t; // 2*var + sign
	using CRef = std::uint32_t;
	static constexpr CRef kNoReason = 0xffffffffu;

	struct Clause {
		std::vector<Lit> lits;
		bool learnt = false;
		bool deleted = false;
		std::uint32_t lbd = 0;
		double activity = 0;
	};
	struct Watcher {
		CRef cref;
		Lit blocker;
	};

	static Lit mk(int dimacs) { return dimacs > 0 ? static_cast<Lit>(2 * (dimacs - 1)) : static_cast<Lit>(2 * (-dimacs - 1) + 1); }
	static std::uint32_t var(Lit l) { return l >> 1; }
	static Lit neg(Lit l) { return l ^ 1u; }
	// 0 true, 1 false, 2 undefined
	std::uint8_t val(Lit l) const {
		std::uint8_t a = assigns_[var(l)];
		return a == 2 ? 2 : static_cast<std::uint8_t>(a ^ (l & 1u));
	}

	void assign(Lit l, CRef reason);
	CRef propagate();
	void analyze(CRef confl, std::vector<Lit>& out, int& bt_level, std::uint32_t& lbd);
	bool redundant(Lit l, std::uint32_t abstract_levels);
	void backtrack(int level);
	Lit pick_branch();
	void bump_var(std::uint32_t v);
	void bump_clause(Clause& c);
	void reduce_db();
	void attach(CRef cr);
	int level() const { return static_cast<int>(trail_lim_.size()); }

	void heap_insert(std::uint32_t v);
	void heap_up(std::size_t i);
	void heap_down(std::size_t i);
	std::uint32_t heap_pop();

	std::vector<Clause> clauses_;
	std::vector<std::vector<Watcher>> watches_;
	std::vector<std::uint8_t> assigns_;
	std::vector<std::uint8_t> polarity_;
	std::vector<int> levels_;
	std::vector<CRef> reasons_;
	std::vector<double> activity_;
	std::vector<Lit> trail_;
	std::vector<std::size_t> trail_lim_;
	std::size_t qhead_ = 0;
	std::vector<std::uint32_t> heap_;
	std::vector<int> heap_pos_;
	std::vector<std::uint8_t> seen_;
	std::vector<Lit> analyze_stack_;
	std::vector<Lit> analyze_clear_;
	std::vector<bool> model_;
	double var_inc_ = 1.0;
	double cla_inc_ = 1.0;
	bool ok_ = true;
	std::uint64_t conflicts_ = 0;
	std::uint64_t decisions_ = 0;
	std::size_t num_original_ = 0;
	std::size_t num_learnts_ = 0;
	std::uint64_t rng_;
};

} // namespace cyclock
