#include "cyclock/attacks.hpp"

#include "cyclock/cnf.hpp"
#include "cyclock/graph.hpp"

#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

namespace cyclock {

const char* to_string(AttackMode m) {
	switch (m) {
	case AttackMode::Sat: return "sat";
	case AttackMode::CycSat: return "cycsat";
	case AttackMode::Reduction: return "reduction";
	case AttackMode::BeSat: return "besat";
	}
	return "?";
}

const char* to_string(AttackStatus s) {
	switch (s) {
	case AttackStatus::KeyFound: return "KeyFound";
	case AttackStatus::Unsat: return "Unsat";
	case AttackStatus::PreprocessTimeout: return "PreprocessTimeout";
	case AttackStatus::TrapDetected: return "TrapDetected";
	case AttackStatus::Deadline: return "Deadline";
	}
	return "?";
}

std::optional<AttackMode> attack_mode_from_name(const std::string& s) {
	if (s == "sat") return AttackMode::Sat;
	if (s == "cycsat") return AttackMode::CycSat;
	if (s == "reduction") return AttackMode::Reduction;
	if (s == "besat") return AttackMode::BeSat;
	return std::nullopt;
}

namespace {

/// Incremental embedded solver, optionally mirrored into a formula for an external solver.
class Backend : public ClauseSink {
public:
	Backend(std::uint64_t seed, bool external) : s_(seed), ext_(external && std::getenv("CYCLOCK_SAT_CMD")) {}
	int new_var() override {
		int v = s_.new_var();
		if (ext_) f_.num_vars = v;
		return v;
	}
	void add(const std::vector<int>& c) override {
		s_.add_clause(c);
		if (ext_) f_.add(c);
	}
	SatStatus solve(Deadline d) {
		if (!ext_) return s_.solve({}, d);
		auto o = cyclock::solve(f_, {}, d, true);
		model_ = std::move(o.model);
		return o.status;
	}
	bool lit_value(int l) const {
		if (!ext_) return s_.lit_value(l);
		bool v = model_.at(static_cast<std::size_t>(std::abs(l) - 1));
		return l > 0 ? v : !v;
	}

private:
	Solver s_;
	CnfFormula f_;
	bool ext_;
	std::vector<bool> model_;
};

struct Constraint {
	std::optional<NcClauseSet> nc;
	std::optional<RcClauseSet> rc;
	bool signals() const { return nc && nc->uses_signals; }
	void apply(ClauseSink& s, const std::vector<int>& lit) const {
		if (nc) encode_nc(s, *nc, lit);
		if (rc) encode_rc(s, *rc, lit);
	}
};

std::vector<Bits> check_vectors(std::size_t pis, std::uint64_t seed, std::size_t exhaustive_limit, std::size_t samples) {
	std::vector<Bits> v;
	if (pis <= exhaustive_limit) {
		for (std::uint64_t m = 0; m < (1ull << pis); ++m) {
			Bits b(pis);
			for (std::size_t i = 0; i < pis; ++i) b[i] = (m >> i) & 1;
			v.push_back(std::move(b));
		}
		return v;
	}
	std::mt19937_64 rng(seed);
	for (std::size_t t = 0; t < samples; ++t) {
		Bits b(pis);
		for (std::size_t i = 0; i < pis; ++i) b[i] = rng() & 1;
		v.push_back(std::move(b));
	}
	return v;
}

class DipLoop {
public:
	DipLoop(const Netlist& n, Oracle& o, const AttackConfig& c, const Constraint& con, bool besat, bool refine,
	        AttackResult& r)
	    : n_(n), o_(o), c_(c), con_(con), besat_(besat), refine_(refine), r_(r), pis_(n.primary_inputs()), keys_(n.key_inputs()),
	      miter_(c.seed, c.external_solver), keygen_(c.seed + 1, c.external_solver),
	      total_(Deadline::after(c.timeout)), acyclic_(is_acyclic(n)) {
		for (std::size_t i = 0; i < pis_.size(); ++i) x_.push_back(miter_.new_var());
		for (std::size_t i = 0; i < keys_.size(); ++i) {
			k1_.push_back(miter_.new_var());
			k2_.push_back(miter_.new_var());
			kk_.push_back(keygen_.new_var());
		}
		std::unordered_map<NetId, int> s1, s2;
		for (std::size_t i = 0; i < pis_.size(); ++i) s1[pis_[i]] = s2[pis_[i]] = x_[i];
		for (std::size_t i = 0; i < keys_.size(); ++i) s1[keys_[i]] = k1_[i], s2[keys_[i]] = k2_[i];
		auto l1 = encode_netlist(miter_, n_, s1);
		auto l2 = encode_netlist(miter_, n_, s2);
		std::vector<int> diff;
		for (NetId po : n_.outputs()) diff.push_back(encode_xor(miter_, l1[po], l2[po]));
		miter_.add(diff);
		con_.apply(miter_, l1);
		con_.apply(miter_, l2);
		if (!con_.signals()) {
			std::vector<int> lk(n_.num_nets(), 0);
			for (std::size_t i = 0; i < keys_.size(); ++i) lk[keys_[i]] = kk_[i];
			con_.apply(keygen_, lk);
		}
	}

	void run() {
		Stopwatch sw;
		run_inner();
		r_.solve_seconds = sw.seconds();
	}

private:
	Bits values(const Backend& b, const std::vector<int>& v) const {
		Bits out;
		for (int l : v) out.push_back(b.lit_value(l));
		return out;
	}

	void add_copy(Backend& b, const Bits& x, const Bits& y, const std::vector<int>& kv) {
		std::unordered_map<NetId, int> sh;
		int t = b.true_lit();
		for (std::size_t i = 0; i < pis_.size(); ++i) sh[pis_[i]] = x[i] ? t : -t;
		for (std::size_t i = 0; i < keys_.size(); ++i) sh[keys_[i]] = kv[i];
		auto lit = encode_netlist(b, n_, sh);
		for (std::size_t i = 0; i < n_.outputs().size(); ++i) {
			int l = lit[n_.outputs()[i]];
			b.add({y[i] ? l : -l});
		}
		if (con_.signals()) con_.apply(b, lit);
	}

	void add_dip(const Bits& x) {
		Bits y = o_.query(x);
		answers_[x] = y;
		dips_.insert(x);
		add_copy(miter_, x, y, k1_);
		add_copy(miter_, x, y, k2_);
		add_copy(keygen_, x, y, kk_);
		++r_.dip_count;
	}

	void ban(const Bits& k) {
		auto block = [&](Backend& b, const std::vector<int>& kv) {
			std::vector<int> c;
			for (std::size_t i = 0; i < kv.size(); ++i) c.push_back(k[i] ? -kv[i] : kv[i]);
			b.add(c);
		};
		block(miter_, k1_);
		block(miter_, k2_);
		block(keygen_, kk_);
		r_.banned.push_back(n_.key_assignment(k));
	}

	bool disagrees(const Bits& k, const Bits& x) {
		auto it = answers_.find(x);
		Bits y = it != answers_.end() ? it->second : (answers_[x] = o_.query(x));
		auto res = evaluate_cyclic(n_, x, n_.key_assignment(k));
		return res.status != EvalStatus::Stable || res.bits() != y;
	}

	void run_inner() {
		unsigned timeouts = 0, stuck = 0;
		for (;;) {
			// DIP phase
			for (;;) {
				if (total_.expired()) return finish(AttackStatus::Deadline);
				if (r_.dip_count >= c_.max_iterations) return trap("iteration_cap");
				Deadline d = c_.call_timeout > 0 ? Deadline::earliest(total_, Deadline::after(c_.call_timeout)) : total_;
				SatStatus st = miter_.solve(d);
				if (st == SatStatus::Aborted) {
					if (total_.expired()) return finish(AttackStatus::Deadline);
					if (++timeouts >= c_.max_call_timeouts) return trap("solver_timeout");
					continue;
				}
				if (st == SatStatus::Unsat) break;
				Bits x = values(miter_, x_);
				if (dips_.count(x)) {
					if (!besat_) return trap("repeated_dip");
					Bits a = values(miter_, k1_), b = values(miter_, k2_);
					bool any = false;
					for (const Bits* k : {&a, &b})
						if (disagrees(*k, x)) {
							ban(*k);
							any = true;
						}
					if (!any && ++stuck >= 3) return trap("repeated_dip");
					continue;
				}
				add_dip(x);
			}
			// key extraction
			for (;;) {
				SatStatus st = keygen_.solve(total_);
				if (st == SatStatus::Aborted) return finish(AttackStatus::Deadline);
				if (st == SatStatus::Unsat) return finish(AttackStatus::Unsat);
				Bits k = values(keygen_, kk_);
				KeyAssignment ka = n_.key_assignment(k);
				if (besat_) {
					std::mt19937_64 rng(c_.seed);
					bool osc = false;
					for (int t = 0; t < 64 && !osc; ++t) {
						Bits x(pis_.size());
						for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng() & 1;
						osc = evaluate_cyclic(n_, x, ka).status == EvalStatus::Oscillating;
					}
					if (osc) {
						ban(k);
						r_.notes.push_back("pruned oscillating key");
						continue;
					}
				}
				if (c_.skip_key_check) {
					r_.key = ka;
					return finish(AttackStatus::KeyFound);
				}
				if (refine_ && ambiguous(k)) {
					// the correct key gives one output per input, so this one cannot be it
					ban(k);
					++ambiguous_;
					continue;
				}
				auto w = witness(k);
				if (!w) {
					r_.key = ka;
					return finish(AttackStatus::KeyFound);
				}
				if (!besat_) {
					// constrained attacks: a failed check is one more oracle query, keep going
					if (refine_ && !dips_.count(*w)) {
						add_dip(*w);
						++refinements_;
						break;
					}
					r_.key = ka;
					return trap("wrong_key");
				}
				if (dips_.count(*w)) {
					ban(k);
					continue;
				}
				add_dip(*w);
				break; // back to the DIP phase
			}
			if (total_.expired()) return finish(AttackStatus::Deadline);
		}
	}

	/// Two fixpoints of the keyed circuit with different outputs for one input.
	bool ambiguous(const Bits& k) {
		if (acyclic_) return false;
		CnfFormula f;
		std::unordered_map<NetId, int> sh;
		int t = f.true_lit();
		for (NetId p : pis_) sh[p] = f.new_var();
		for (std::size_t i = 0; i < keys_.size(); ++i) sh[keys_[i]] = k[i] ? t : -t;
		auto a = encode_netlist(f, n_, sh);
		auto b = encode_netlist(f, n_, sh);
		std::vector<int> diff;
		for (NetId po : n_.outputs()) diff.push_back(encode_xor(f, a[po], b[po]));
		f.add(diff);
		return solve(f, {}, total_).status == SatStatus::Sat;
	}

	std::optional<Bits> witness(const Bits& k) {
		for (const auto& x : check_vectors(pis_.size(), c_.seed, 14, 4096)) {
			if (total_.expired()) break;
			if (disagrees(k, x)) return x;
		}
		return std::nullopt;
	}

	void trap(const std::string& why) {
		r_.trap_reason = why;
		finish(AttackStatus::TrapDetected);
	}
	void finish(AttackStatus s) {
		r_.status = s;
		if (ambiguous_) r_.notes.push_back(std::to_string(ambiguous_) + " keys with ambiguous outputs pruned");
		if (refinements_) r_.notes.push_back(std::to_string(refinements_) + " failed key checks fed back as queries");
	}

	const Netlist& n_;
	Oracle& o_;
	const AttackConfig& c_;
	const Constraint& con_;
	bool besat_, refine_;
	std::size_t refinements_ = 0, ambiguous_ = 0;
	AttackResult& r_;
	std::vector<NetId> pis_, keys_;
	Backend miter_, keygen_;
	Deadline total_;
	bool acyclic_;
	std::vector<int> x_, k1_, k2_, kk_;
	std::map<Bits, Bits> answers_; // oracle cache
	std::set<Bits> dips_;
};

void check_signature(const Netlist& n, const Oracle& o) {
	if (o.num_inputs() != n.primary_inputs().size() || o.num_outputs() != n.outputs().size())
		throw std::invalid_argument("oracle signature does not match the locked netlist");
}

AttackResult run_loop(const Netlist& n, Oracle& o, const AttackConfig& c, const Constraint& con, bool besat, bool refine,
                      AttackResult r) {
	if (n.key_inputs().empty()) {
		r.status = AttackStatus::KeyFound;
		r.key = KeyAssignment{};
		return r;
	}
	DipLoop loop(n, o, c, con, besat, refine, r);
	loop.run();
	return r;
}

} // namespace

AttackResult sat_attack(const Netlist& locked, Oracle& oracle, const AttackConfig& c) {
	check_signature(locked, oracle);
	return run_loop(locked, oracle, c, Constraint{}, false, false, AttackResult{});
}

AttackResult cycsat_attack(const Netlist& locked, Oracle& oracle, const AttackConfig& c) {
	check_signature(locked, oracle);
	AttackResult r;
	NcCondition cond = c.nc.value_or(NcCondition::Structural);
	r.nc_condition = to_string(cond);
	Stopwatch sw;
	Constraint con;
	con.nc = build_nc(locked, cond, c.traversal, Deadline::after(c.preprocess_timeout));
	r.preprocess_seconds = sw.seconds();
	r.cycles = con.nc->cycles_seen;
	r.cycles_truncated = con.nc->truncated;
	r.constraint_clauses = con.nc->clauses.size();
	if (con.nc->truncated) {
		r.status = AttackStatus::PreprocessTimeout;
		return r;
	}
	if (con.nc->hard) r.notes.push_back(std::to_string(con.nc->hard) + " unbreakable cycles");
	return run_loop(locked, oracle, c, con, false, true, r);
}

AttackResult reduction_attack(const Netlist& locked, Oracle& oracle, const AttackConfig& c) {
	check_signature(locked, oracle);
	AttackResult r;
	Stopwatch sw;
	Constraint con;
	con.rc = reduction_attack_clauses(locked, Deadline::after(c.preprocess_timeout));
	r.preprocess_seconds = sw.seconds();
	r.cycles = con.rc->cycles.size();
	r.cycles_truncated = con.rc->truncated;
	r.constraint_clauses = con.rc->entries.size();
	if (con.rc->truncated) {
		r.status = AttackStatus::PreprocessTimeout;
		return r;
	}
	return run_loop(locked, oracle, c, con, false, true, r);
}

AttackResult besat_attack(const Netlist& locked, Oracle& oracle, const AttackConfig& c) {
	check_signature(locked, oracle);
	AttackResult r;
	Stopwatch sw;
	// one pass collects both conditions; real (key-free) cycles select the sensitizable one
	NcClauseSet structural, sensitizable;
	bool real = false;
	std::uint64_t seen = 0;
	bool done = for_each_cycle(
	    locked,
	    [&](const Cycle& cy) {
		    ++seen;
		    auto s = nc_cycle(locked, cy, NcCondition::Structural);
		    if (s.empty()) real = true;
		    if (!c.nc || *c.nc == NcCondition::Structural) add_nc_clause(structural, s);
		    if (!c.nc || *c.nc == NcCondition::Sensitizable) add_nc_clause(sensitizable, nc_cycle(locked, cy, NcCondition::Sensitizable));
		    return true;
	    },
	    Deadline::after(c.preprocess_timeout));
	NcCondition cond = c.nc.value_or(real ? NcCondition::Sensitizable : NcCondition::Structural);
	Constraint con;
	con.nc = cond == NcCondition::Structural ? std::move(structural) : std::move(sensitizable);
	con.nc->truncated = !done;
	con.nc->cycles_seen = seen;
	for (const auto& cl : con.nc->clauses)
		for (const auto& l : cl)
			if (!locked.is_key(l.net)) con.nc->uses_signals = true;
	r.preprocess_seconds = sw.seconds();
	r.nc_condition = to_string(cond);
	r.cycles = seen;
	r.cycles_truncated = !done;
	r.constraint_clauses = con.nc->clauses.size();
	if (!done) r.notes.push_back("partial NC: preprocessing deadline reached");
	r.notes.push_back("oscillation pruning by ternary simulation on 64 random inputs");
	return run_loop(locked, oracle, c, con, true, false, r);
}

AttackResult run_attack(const Netlist& locked, Oracle& oracle, const AttackConfig& c) {
	switch (c.mode) {
	case AttackMode::Sat: return sat_attack(locked, oracle, c);
	case AttackMode::CycSat: return cycsat_attack(locked, oracle, c);
	case AttackMode::Reduction: return reduction_attack(locked, oracle, c);
	case AttackMode::BeSat: return besat_attack(locked, oracle, c);
	}
	throw std::invalid_argument("unknown attack mode");
}

KeyVerdict verify_key(const Netlist& original, const Netlist& locked, const KeyAssignment& key, std::uint64_t seed) {
	std::size_t pis = original.primary_inputs().size();
	if (pis != locked.primary_inputs().size() || original.outputs().size() != locked.outputs().size())
		throw std::invalid_argument("signature mismatch between original and locked netlists");
	KeyVerdict v;
	CyclicEvaluator ref(original, {});
	CyclicEvaluator dut(locked, locked.key_bits(key));
	bool exhaustive = pis <= 16;
	v.method = exhaustive ? "exhaustive" : "random";
	for (const auto& x : check_vectors(pis, seed, 16, 10000)) {
		auto a = ref.run(x), b = dut.run(x);
		if (b.status != EvalStatus::Stable) {
			v.stateful = true;
			v.witness = x;
			return v;
		}
		if (a.status != EvalStatus::Stable || a.outputs != b.outputs) {
			v.witness = x;
			return v;
		}
	}
	if (!exhaustive) {
		bool acyclic = is_acyclic(original);
		try {
			Evaluator e(locked, locked.key_bits(key));
		} catch (const CycleError&) {
			acyclic = false;
		}
		if (acyclic) {
			v.method = "random+sat";
			CnfFormula f;
			std::unordered_map<NetId, int> sh1, sh2;
			std::vector<int> xv;
			for (std::size_t i = 0; i < pis; ++i) xv.push_back(f.new_var());
			auto opis = original.primary_inputs(), lpis = locked.primary_inputs();
			for (std::size_t i = 0; i < pis; ++i) sh1[opis[i]] = xv[i], sh2[lpis[i]] = xv[i];
			int t = f.true_lit();
			for (NetId k : locked.key_inputs()) sh2[k] = key.at(locked.net(k).name) ? t : -t;
			auto l1 = encode_netlist(f, original, sh1);
			auto l2 = encode_netlist(f, locked, sh2);
			std::vector<int> diff;
			for (std::size_t i = 0; i < original.outputs().size(); ++i)
				diff.push_back(encode_xor(f, l1[original.outputs()[i]], l2[locked.outputs()[i]]));
			f.add(diff);
			auto out = solve(f);
			if (out.status == SatStatus::Sat) {
				Bits w;
				for (int x : xv) w.push_back(out.value(x));
				v.witness = w;
				return v;
			}
		}
	}
	v.equivalent = true;
	return v;
}

} // namespace cyclock
