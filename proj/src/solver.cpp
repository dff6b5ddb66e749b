#include "cyclock/solver.hpp"

#include <algorithm>
#include <stdexcept>

namespace cyclock {

const char* to_string(SatStatus s) {
	switch (s) {
	case SatStatus::Sat: return "SAT";
	case SatStatus::Unsat: return "UNSAT";
	case SatStatus::Aborted: return "ABORTED";
	}
	return "?";
}

namespace {

double luby(double y, int x) {
	int size = 1, seq = 0;
	while (size < x + 1) {
		++seq;
		size = 2 * size + 1;
	}
	while (size - 1 != x) {
		size = (size - 1) >> 1;
		--seq;
		x = x % size;
	}
	double r = 1;
	for (int i = 0; i < seq; ++i) r *= y;
	return r;
}

std::uint64_t splitmix(std::uint64_t& s) {
	std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
	return z ^ (z >> 31);
}

} // namespace

Solver::Solver(std::uint64_t seed) : rng_(seed) {}

int Solver::new_var() {
	std::uint32_t v = static_cast<std::uint32_t>(assigns_.size());
	assigns_.push_back(2);
	polarity_.push_back(1);
	levels_.push_back(0);
	reasons_.push_back(kNoReason);
	// tiny seeded jitter so that the seed influences branching order
	activity_.push_back(static_cast<double>(splitmix(rng_) % 1000) * 1e-9);
	seen_.push_back(0);
	heap_pos_.push_back(-1);
	watches_.emplace_back();
	watches_.emplace_back();
	heap_insert(v);
	return static_cast<int>(v) + 1;
}

void Solver::reserve_vars(int n) {
	while (num_vars() < n) new_var();
}

void Solver::heap_up(std::size_t i) {
	std::uint32_t v = heap_[i];
	while (i > 0) {
		std::size_t p = (i - 1) / 2;
		if (activity_[heap_[p]] >= activity_[v]) break;
		heap_[i] = heap_[p];
		heap_pos_[heap_[i]] = static_cast<int>(i);
		i = p;
	}
	heap_[i] = v;
	heap_pos_[v] = static_cast<int>(i);
}

void Solver::heap_down(std::size_t i) {
	std::uint32_t v = heap_[i];
	for (;;) {
		std::size_t c = 2 * i + 1;
		if (c >= heap_.size()) break;
		if (c + 1 < heap_.size() && activity_[heap_[c + 1]] > activity_[heap_[c]]) ++c;
		if (activity_[heap_[c]] <= activity_[v]) break;
		heap_[i] = heap_[c];
		heap_pos_[heap_[i]] = static_cast<int>(i);
		i = c;
	}
	heap_[i] = v;
	heap_pos_[v] = static_cast<int>(i);
}

void Solver::heap_insert(std::uint32_t v) {
	if (heap_pos_[v] >= 0) return;
	heap_.push_back(v);
	heap_up(heap_.size() - 1);
}

std::uint32_t Solver::heap_pop() {
	std::uint32_t top = heap_[0];
	heap_pos_[top] = -1;
	std::uint32_t last = heap_.back();
	heap_.pop_back();
	if (!heap_.empty()) {
		heap_[0] = last;
		heap_pos_[last] = 0;
		heap_down(0);
	}
	return top;
}

void Solver::bump_var(std::uint32_t v) {
	if ((activity_[v] += var_inc_) > 1e100) {
		for (auto& a : activity_) a *= 1e-100;
		var_inc_ *= 1e-100;
	}
	if (heap_pos_[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

void Solver::bump_clause(Clause& c) {
	if ((c.activity += cla_inc_) > 1e20) {
		for (auto& cl : clauses_)
			if (cl.learnt) cl.activity *= 1e-20;
		cla_inc_ *= 1e-20;
	}
}

void Solver::assign(Lit l, CRef reason) {
	std::uint32_t v = var(l);
	assigns_[v] = static_cast<std::uint8_t>(l & 1u);
	levels_[v] = level();
	reasons_[v] = reason;
	trail_.push_back(l);
}

void Solver::attach(CRef cr) {
	const Clause& c = clauses_[cr];
	watches_[neg(c.lits[0])].push_back({cr, c.lits[1]});
	watches_[neg(c.lits[1])].push_back({cr, c.lits[0]});
}

bool Solver::add_clause(const std::vector<int>& in) {
	if (!ok_) return false;
	backtrack(0);
	std::vector<Lit> ls;
	ls.reserve(in.size());
	for (int d : in) {
		if (d == 0) throw std::invalid_argument("literal 0 in clause");
		reserve_vars(std::abs(d));
		ls.push_back(mk(d));
	}
	std::sort(ls.begin(), ls.end());
	ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
	std::vector<Lit> kept;
	for (std::size_t i = 0; i < ls.size(); ++i) {
		if (i + 1 < ls.size() && ls[i + 1] == neg(ls[i])) return true; // tautology
		std::uint8_t v = val(ls[i]);
		if (v == 0) return true;
		if (v == 2) kept.push_back(ls[i]);
	}
	++num_original_;
	if (kept.empty()) return ok_ = false;
	if (kept.size() == 1) {
		assign(kept[0], kNoReason);
		if (propagate() != kNoReason) ok_ = false;
		return ok_;
	}
	CRef cr = static_cast<CRef>(clauses_.size());
	clauses_.push_back({std::move(kept), false, false, 0, 0});
	attach(cr);
	return true;
}

Solver::CRef Solver::propagate() {
	CRef confl = kNoReason;
	while (qhead_ < trail_.size()) {
		Lit p = trail_[qhead_++];
		Lit false_lit = neg(p);
		auto& ws = watches_[p];
		std::size_t i = 0, j = 0;
		while (i < ws.size()) {
			Watcher w = ws[i++];
			if (val(w.blocker) == 0) {
				ws[j++] = w;
				continue;
			}
			Clause& c = clauses_[w.cref];
			if (c.deleted) continue;
			if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
			Lit first = c.lits[0];
			if (first != w.blocker && val(first) == 0) {
				ws[j++] = {w.cref, first};
				continue;
			}
			bool moved = false;
			for (std::size_t k = 2; k < c.lits.size(); ++k) {
				if (val(c.lits[k]) != 1) {
					std::swap(c.lits[1], c.lits[k]);
					watches_[neg(c.lits[1])].push_back({w.cref, first});
					moved = true;
					break;
				}
			}
			if (moved) continue;
			ws[j++] = {w.cref, first};
			if (val(first) == 1) {
				confl = w.cref;
				qhead_ = trail_.size();
				while (i < ws.size()) ws[j++] = ws[i++];
			} else {
				assign(first, w.cref);
			}
		}
		ws.resize(j);
		if (confl != kNoReason) break;
	}
	return confl;
}

bool Solver::redundant(Lit p, std::uint32_t abstract_levels) {
	analyze_stack_.clear();
	analyze_stack_.push_back(p);
	std::size_t top = analyze_clear_.size();
	while (!analyze_stack_.empty()) {
		Lit q = analyze_stack_.back();
		analyze_stack_.pop_back();
		const Clause& c = clauses_[reasons_[var(q)]];
		for (std::size_t i = 1; i < c.lits.size(); ++i) {
			Lit l = c.lits[i];
			std::uint32_t v = var(l);
			if (seen_[v] || levels_[v] == 0) continue;
			if (reasons_[v] != kNoReason && ((1u << (levels_[v] & 31)) & abstract_levels)) {
				seen_[v] = 1;
				analyze_stack_.push_back(l);
				analyze_clear_.push_back(l);
			} else {
				for (std::size_t k = top; k < analyze_clear_.size(); ++k) seen_[var(analyze_clear_[k])] = 0;
				analyze_clear_.resize(top);
				return false;
			}
		}
	}
	return true;
}

void Solver::analyze(CRef confl, std::vector<Lit>& out, int& bt_level, std::uint32_t& lbd) {
	int path = 0;
	Lit p = 0;
	bool have_p = false;
	out.clear();
	out.push_back(0);
	std::size_t idx = trail_.size();
	do {
		Clause& c = clauses_[confl];
		if (c.learnt) bump_clause(c);
		for (std::size_t i = have_p ? 1 : 0; i < c.lits.size(); ++i) {
			Lit q = c.lits[i];
			std::uint32_t v = var(q);
			if (seen_[v] || levels_[v] == 0) continue;
			seen_[v] = 1;
			bump_var(v);
			if (levels_[v] >= level()) ++path;
			else out.push_back(q);
		}
		while (!seen_[var(trail_[--idx])]) {}
		p = trail_[idx];
		have_p = true;
		confl = reasons_[var(p)];
		seen_[var(p)] = 0;
		--path;
	} while (path > 0);
	out[0] = neg(p);

	analyze_clear_.assign(out.begin(), out.end());
	std::uint32_t abstract_levels = 0;
	for (std::size_t i = 1; i < out.size(); ++i) abstract_levels |= 1u << (levels_[var(out[i])] & 31);
	std::size_t j = 1;
	for (std::size_t i = 1; i < out.size(); ++i)
		if (reasons_[var(out[i])] == kNoReason || !redundant(out[i], abstract_levels)) out[j++] = out[i];
	out.resize(j);

	bt_level = 0;
	if (out.size() > 1) {
		std::size_t max_i = 1;
		for (std::size_t i = 2; i < out.size(); ++i)
			if (levels_[var(out[i])] > levels_[var(out[max_i])]) max_i = i;
		std::swap(out[1], out[max_i]);
		bt_level = levels_[var(out[1])];
	}
	std::vector<int> lv;
	for (Lit l : out) lv.push_back(levels_[var(l)]);
	std::sort(lv.begin(), lv.end());
	lbd = static_cast<std::uint32_t>(std::unique(lv.begin(), lv.end()) - lv.begin());
	for (Lit l : analyze_clear_) seen_[var(l)] = 0;
}

void Solver::backtrack(int lvl) {
	if (level() <= lvl) return;
	for (std::size_t i = trail_.size(); i-- > trail_lim_[static_cast<std::size_t>(lvl)];) {
		std::uint32_t v = var(trail_[i]);
		polarity_[v] = trail_[i] & 1u;
		assigns_[v] = 2;
		reasons_[v] = kNoReason;
		heap_insert(v);
	}
	trail_.resize(trail_lim_[static_cast<std::size_t>(lvl)]);
	trail_lim_.resize(static_cast<std::size_t>(lvl));
	qhead_ = trail_.size();
}

Solver::Lit Solver::pick_branch() {
	while (!heap_.empty()) {
		std::uint32_t v = heap_pop();
		if (assigns_[v] == 2) return 2 * v + polarity_[v];
	}
	return 0xffffffffu;
}

void Solver::reduce_db() {
	// only called at level 0, so no learnt clause is a live reason
	std::vector<CRef> learnts;
	for (CRef i = 0; i < clauses_.size(); ++i)
		if (clauses_[i].learnt && !clauses_[i].deleted) learnts.push_back(i);
	std::sort(learnts.begin(), learnts.end(), [&](CRef a, CRef b) {
		if (clauses_[a].lbd != clauses_[b].lbd) return clauses_[a].lbd > clauses_[b].lbd;
		return clauses_[a].activity < clauses_[b].activity;
	});
	std::size_t drop = learnts.size() / 2;
	for (std::size_t i = 0; i < drop; ++i)
		if (clauses_[learnts[i]].lbd > 2) clauses_[learnts[i]].deleted = true;

	std::vector<Clause> kept;
	kept.reserve(clauses_.size());
	num_learnts_ = 0;
	for (auto& c : clauses_) {
		if (c.deleted) continue;
		if (c.learnt) ++num_learnts_;
		kept.push_back(std::move(c));
	}
	clauses_ = std::move(kept);
	for (auto& r : reasons_) r = kNoReason;
	for (auto& w : watches_) w.clear();
	for (CRef i = 0; i < clauses_.size(); ++i) attach(i);
}

SatStatus Solver::solve(const std::vector<int>& assumptions, Deadline deadline) {
	model_.clear();
	if (!ok_) return SatStatus::Unsat;
	backtrack(0);
	std::vector<Lit> assume;
	for (int a : assumptions) {
		reserve_vars(std::abs(a));
		assume.push_back(mk(a));
	}
	if (propagate() != kNoReason) {
		ok_ = false;
		return SatStatus::Unsat;
	}
	std::vector<Lit> learnt;
	int restarts = 0;
	std::uint64_t budget = static_cast<std::uint64_t>(luby(2, restarts) * 100);
	std::uint64_t since_restart = 0;
	std::size_t max_learnts = std::max<std::size_t>(num_original_ / 3, 4000);
	std::uint64_t ticks = 0;
	for (;;) {
		CRef confl = propagate();
		if (confl != kNoReason) {
			++conflicts_;
			++since_restart;
			if (level() == 0) {
				ok_ = false;
				return SatStatus::Unsat;
			}
			int bt = 0;
			std::uint32_t lbd = 0;
			analyze(confl, learnt, bt, lbd);
			backtrack(bt);
			if (learnt.size() == 1) {
				assign(learnt[0], kNoReason);
			} else {
				CRef cr = static_cast<CRef>(clauses_.size());
				clauses_.push_back({learnt, true, false, lbd, 0});
				bump_clause(clauses_.back());
				attach(cr);
				++num_learnts_;
				assign(learnt[0], cr);
			}
			var_inc_ /= 0.95;
			cla_inc_ /= 0.999;
			if ((conflicts_ & 255) == 0 && deadline.expired()) {
				backtrack(0);
				return SatStatus::Aborted;
			}
			continue;
		}
		if (since_restart >= budget) {
			backtrack(0);
			++restarts;
			since_restart = 0;
			budget = static_cast<std::uint64_t>(luby(2, restarts) * 100);
			if (num_learnts_ > max_learnts) {
				reduce_db();
				max_learnts += max_learnts / 10;
			}
			if (deadline.expired()) return SatStatus::Aborted;
		}
		Lit next = 0xffffffffu;
		while (static_cast<std::size_t>(level()) < assume.size()) {
			Lit p = assume[static_cast<std::size_t>(level())];
			std::uint8_t v = val(p);
			if (v == 0) {
				trail_lim_.push_back(trail_.size());
			} else if (v == 1) {
				backtrack(0);
				return SatStatus::Unsat;
			} else {
				next = p;
				break;
			}
		}
		if (next == 0xffffffffu) {
			++decisions_;
			if ((++ticks & 1023) == 0 && deadline.expired()) {
				backtrack(0);
				return SatStatus::Aborted;
			}
			next = pick_branch();
			if (next == 0xffffffffu) {
				model_.assign(assigns_.size(), false);
				for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v] = assigns_[v] == 0;
				backtrack(0);
				return SatStatus::Sat;
			}
		}
		trail_lim_.push_back(trail_.size());
		assign(next, kNoReason);
	}
}

} // namespace cyclock
