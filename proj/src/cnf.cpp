#include "cyclock/cnf.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace cyclock {

int ClauseSink::true_lit() {
	if (!true_var_) {
		true_var_ = new_var();
		add({true_var_});
	}
	return true_var_;
}

void CnfFormula::add(const std::vector<int>& clause) {
	std::vector<int> c = clause;
	std::sort(c.begin(), c.end(), [](int a, int b) { return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b; });
	c.erase(std::unique(c.begin(), c.end()), c.end());
	for (std::size_t i = 0; i + 1 < c.size(); ++i)
		if (c[i] == -c[i + 1]) return;
	for (int l : c) num_vars = std::max(num_vars, std::abs(l));
	clauses.push_back(std::move(c));
}

void encode_gate(ClauseSink& s, GateFunc f, int y, const std::vector<int>& in) {
	switch (f) {
	case GateFunc::Buf:
		s.add({-y, in[0]});
		s.add({y, -in[0]});
		return;
	case GateFunc::Not:
		s.add({-y, -in[0]});
		s.add({y, in[0]});
		return;
	case GateFunc::And:
	case GateFunc::Nand: {
		int o = f == GateFunc::And ? y : -y;
		std::vector<int> big{o};
		for (int a : in) {
			s.add({-o, a});
			big.push_back(-a);
		}
		s.add(big);
		return;
	}
	case GateFunc::Or:
	case GateFunc::Nor: {
		int o = f == GateFunc::Or ? y : -y;
		std::vector<int> big{-o};
		for (int a : in) {
			s.add({o, -a});
			big.push_back(a);
		}
		s.add(big);
		return;
	}
	case GateFunc::Xor:
	case GateFunc::Xnor: {
		int acc = in[0];
		for (std::size_t i = 1; i + 1 < in.size(); ++i) acc = encode_xor(s, acc, in[i]);
		int b = in.back();
		int o = f == GateFunc::Xor ? y : -y;
		s.add({-o, acc, b});
		s.add({-o, -acc, -b});
		s.add({o, -acc, b});
		s.add({o, acc, -b});
		return;
	}
	case GateFunc::Mux: {
		int sel = in[0], a = in[1], b = in[2];
		s.add({-sel, -b, y});
		s.add({-sel, b, -y});
		s.add({sel, -a, y});
		s.add({sel, a, -y});
		s.add({-a, -b, y});
		s.add({a, b, -y});
		return;
	}
	}
}

int encode_xor(ClauseSink& s, int a, int b) {
	int d = s.new_var();
	encode_gate(s, GateFunc::Xor, d, {a, b});
	return d;
}

int encode_or(ClauseSink& s, const std::vector<int>& lits) {
	if (lits.empty()) return -s.true_lit();
	if (lits.size() == 1) return lits[0];
	int d = s.new_var();
	encode_gate(s, GateFunc::Or, d, lits);
	return d;
}

int encode_and(ClauseSink& s, const std::vector<int>& lits) {
	if (lits.empty()) return s.true_lit();
	if (lits.size() == 1) return lits[0];
	int d = s.new_var();
	encode_gate(s, GateFunc::And, d, lits);
	return d;
}

std::vector<int> encode_netlist(ClauseSink& s, const Netlist& n, const std::unordered_map<NetId, int>& shared) {
	std::vector<int> lit(n.num_nets(), 0);
	for (NetId i = 0; i < n.num_nets(); ++i) {
		auto it = shared.find(i);
		lit[i] = it != shared.end() ? it->second : s.new_var();
	}
	std::vector<int> ins;
	for (const Gate& g : n.gates()) {
		if (shared.count(g.output)) throw std::invalid_argument("shared literal on a gate output");
		ins.clear();
		for (NetId in : g.inputs) ins.push_back(lit[in]);
		encode_gate(s, g.func, lit[g.output], ins);
	}
	return lit;
}

void tseitin_into(CnfFormula& f, const Netlist& n, const std::string& tag, const std::unordered_map<NetId, int>& shared) {
	auto lits = encode_netlist(f, n, shared);
	for (NetId i = 0; i < n.num_nets(); ++i)
		if (lits[i] > 0) f.bindings[{tag, i}] = lits[i];
}

CnfFormula tseitin(const Netlist& n, const std::string& tag, const std::unordered_map<NetId, int>& shared) {
	CnfFormula f;
	tseitin_into(f, n, tag, shared);
	return f;
}

Miter build_miter(const Netlist& locked) {
	auto keys = locked.key_inputs();
	if (keys.empty()) throw std::invalid_argument("miter needs at least one key input");
	Miter m;
	std::unordered_map<NetId, int> shared;
	for (NetId p : locked.primary_inputs()) {
		int v = m.cnf.new_var();
		shared[p] = v;
		m.x.push_back(v);
	}
	tseitin_into(m.cnf, locked, "c1", shared);
	auto shared2 = shared;
	for (NetId k : keys) {
		m.k1.push_back(m.cnf.bindings.at({"c1", k}));
		shared2.erase(k);
	}
	tseitin_into(m.cnf, locked, "c2", shared2);
	for (NetId k : keys) m.k2.push_back(m.cnf.bindings.at({"c2", k}));
	std::vector<int> diffs;
	for (NetId o : locked.outputs()) {
		int a = locked.is_input(o) && shared.count(o) ? shared.at(o) : m.cnf.bindings.at({"c1", o});
		int b = locked.is_input(o) && shared.count(o) ? shared.at(o) : m.cnf.bindings.at({"c2", o});
		m.y1.push_back(a);
		m.y2.push_back(b);
		diffs.push_back(encode_xor(m.cnf, a, b));
	}
	m.cnf.add(diffs);
	return m;
}

bool model_satisfies(const CnfFormula& f, const std::vector<bool>& model) {
	for (const auto& c : f.clauses) {
		bool sat = false;
		for (int l : c) {
			std::size_t v = static_cast<std::size_t>(std::abs(l) - 1);
			if (v < model.size() && model[v] == (l > 0)) {
				sat = true;
				break;
			}
		}
		if (!sat) return false;
	}
	return true;
}

SatOutcome solve(const CnfFormula& f, const std::vector<int>& assumptions, Deadline deadline, bool use_external) {
	if (use_external) {
		if (const char* cmd = std::getenv("CYCLOCK_SAT_CMD"); cmd && *cmd) {
			CnfFormula g = f;
			for (int a : assumptions) g.add({a});
			return solve_external(g, cmd, deadline);
		}
	}
	Solver s;
	s.reserve_vars(f.num_vars);
	for (const auto& c : f.clauses) s.add_clause(c);
	SatOutcome out;
	out.status = s.solve(assumptions, deadline);
	if (out.status == SatStatus::Sat) {
		out.model = s.model();
		out.model.resize(static_cast<std::size_t>(f.num_vars));
	}
	return out;
}

std::string export_dimacs(const CnfFormula& f) {
	std::ostringstream os;
	os << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
	for (const auto& c : f.clauses) {
		for (int l : c) os << l << " ";
		os << "0\n";
	}
	return os.str();
}

CnfFormula parse_dimacs(const std::string& text) {
	CnfFormula f;
	std::istringstream in(text);
	std::string line;
	std::vector<int> cur;
	bool header = false;
	int declared = 0;
	while (std::getline(in, line)) {
		std::istringstream ls(line);
		std::string first;
		if (!(ls >> first) || first[0] == 'c' || first[0] == '%') continue;
		if (first == "p") {
			std::string kind;
			long nv = 0, nc = 0;
			if (!(ls >> kind >> nv >> nc) || kind != "cnf") throw std::runtime_error("bad DIMACS header");
			declared = static_cast<int>(nv);
			header = true;
			continue;
		}
		if (!header) throw std::runtime_error("DIMACS clause before header");
		std::istringstream all(line);
		long lit;
		while (all >> lit) {
			if (lit == 0) {
				f.clauses.push_back(cur);
				cur.clear();
			} else {
				cur.push_back(static_cast<int>(lit));
				f.num_vars = std::max(f.num_vars, static_cast<int>(std::labs(lit)));
			}
		}
	}
	if (!cur.empty()) f.clauses.push_back(cur);
	f.num_vars = std::max(f.num_vars, declared);
	return f;
}

SatOutcome import_model(const std::string& text, int num_vars) {
	SatOutcome out;
	std::istringstream in(text);
	std::string line;
	bool have_status = false;
	std::vector<int> lits;
	bool minisat_style = false;
	while (std::getline(in, line)) {
		std::istringstream ls(line);
		std::string tok;
		if (!(ls >> tok)) continue;
		if (tok == "s") {
			std::string st;
			ls >> st;
			if (st == "SATISFIABLE") out.status = SatStatus::Sat;
			else if (st == "UNSATISFIABLE") out.status = SatStatus::Unsat;
			else out.status = SatStatus::Aborted;
			have_status = true;
		} else if (tok == "SAT" || tok == "SATISFIABLE") {
			out.status = SatStatus::Sat;
			have_status = true;
			minisat_style = true;
		} else if (tok == "UNSAT" || tok == "UNSATISFIABLE") {
			out.status = SatStatus::Unsat;
			have_status = true;
		} else if (tok == "INDET" || tok == "UNKNOWN") {
			out.status = SatStatus::Aborted;
			have_status = true;
		} else if (tok == "v" || (minisat_style && (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '-'))) {
			std::istringstream vs(line);
			if (tok == "v") vs >> tok;
			long l;
			while (vs >> l)
				if (l != 0) lits.push_back(static_cast<int>(l));
		} else if (tok[0] == 'c') {
			continue;
		}
	}
	if (!have_status) throw std::runtime_error("malformed solver output: no status line");
	if (out.status == SatStatus::Sat) {
		out.model.assign(static_cast<std::size_t>(num_vars), false);
		for (int l : lits) {
			int v = std::abs(l);
			if (v > num_vars) throw std::runtime_error("malformed solver output: variable out of range");
			out.model[static_cast<std::size_t>(v - 1)] = l > 0;
		}
	}
	return out;
}

SatOutcome solve_external(const CnfFormula& f, const std::string& cmd_template, Deadline deadline) {
	char in_path[] = "/tmp/cyclock_cnf_XXXXXX";
	int fd = mkstemp(in_path);
	if (fd < 0) throw std::runtime_error("cannot create temp file");
	close(fd);
	std::string out_path = std::string(in_path) + ".out";
	{
		std::ofstream o(in_path);
		o << export_dimacs(f);
	}
	std::string cmd = cmd_template;
	bool uses_out = false;
	for (auto [key, val] : {std::pair<std::string, std::string>{"{in}", in_path}, {"{out}", out_path}}) {
		for (auto p = cmd.find(key); p != std::string::npos; p = cmd.find(key)) {
			cmd.replace(p, key.size(), val);
			if (key == "{out}") uses_out = true;
		}
	}
	if (cmd == cmd_template) cmd += std::string(" ") + in_path;
	if (!deadline.is_never()) {
		double secs = std::max(1.0, deadline.remaining());
		cmd = "timeout " + std::to_string(static_cast<long>(secs + 0.999)) + " " + cmd;
	}
	std::string text;
	if (FILE* p = popen(cmd.c_str(), "r")) {
		char buf[4096];
		std::size_t got;
		while ((got = fread(buf, 1, sizeof buf, p)) > 0) text.append(buf, got);
		pclose(p);
	}
	if (uses_out) {
		std::ifstream r(out_path);
		std::stringstream ss;
		ss << r.rdbuf();
		if (!ss.str().empty()) text = ss.str();
	}
	std::remove(in_path);
	std::remove(out_path.c_str());
	if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
		SatOutcome o;
		o.status = SatStatus::Aborted;
		return o;
	}
	auto out = import_model(text, f.num_vars);
	if (out.status == SatStatus::Sat && !model_satisfies(f, out.model))
		throw std::runtime_error("external solver model does not satisfy the formula");
	return out;
}

} // namespace cyclock
