// cyclock command line. Talks to the library only through the C interface.
//
// exit codes: 0 ok, 1 parse/IO, 2 config, 3 not insertable (NiS), 4 Unsat (attack) or
// inequivalent key (verify), 5 timeout or trap, 6 internal error

#include "cyclock/cyclock.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kIo = 1, kConfig = 2, kNis = 3, kUnsat = 4, kTimeout = 5, kInternal = 6 };

struct Failure {
	int code;
};

int exit_of(cyclock_error e) {
	switch (e) {
	case CYCLOCK_OK: return kOk;
	case CYCLOCK_E_PARSE:
	case CYCLOCK_E_IO: return kIo;
	case CYCLOCK_E_CONFIG:
	case CYCLOCK_E_ARG: return kConfig;
	case CYCLOCK_E_NIS: return kNis;
	default: return kInternal;
	}
}

void check(cyclock_error e) {
	if (e == CYCLOCK_OK) return;
	std::cerr << "cyclock: " << cyclock_last_error() << "\n";
	throw Failure{exit_of(e)};
}

struct NetDel {
	void operator()(cyclock_netlist* n) const { cyclock_netlist_free(n); }
};
using NetPtr = std::unique_ptr<cyclock_netlist, NetDel>;

std::string take(char* s) {
	std::string r = s ? s : "";
	cyclock_free_string(s);
	return r;
}

NetPtr load(const std::string& path) {
	cyclock_netlist* n = nullptr;
	check(cyclock_netlist_load(path.c_str(), &n));
	return NetPtr(n);
}

std::string slurp(const std::string& path) {
	std::ifstream in(path);
	if (!in) {
		std::cerr << "cyclock: cannot open '" << path << "'\n";
		throw Failure{kIo};
	}
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void emit(const std::string& text, const std::string& path) {
	if (path.empty() || path == "-") {
		std::cout << text;
		if (!text.empty() && text.back() != '\n') std::cout << "\n";
		return;
	}
	std::ofstream o(path);
	if (!o || !(o << text)) {
		std::cerr << "cyclock: cannot write '" << path << "'\n";
		throw Failure{kIo};
	}
}

// --key accepts a bit string, inline JSON, or a file holding either (an obfuscation report works)
std::string key_text(const std::string& arg) {
	if (arg.empty()) return {};
	if (arg.find_first_not_of("01") == std::string::npos || arg.front() == '{') return arg;
	std::string t = slurp(arg);
	while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
	return t;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"cyclock: cyclic logic locking and attacks"};
	app.require_subcommand(1);
	app.set_version_flag("--version", std::string(cyclock_version()));

	// obfuscate
	auto* ob = app.add_subcommand("obfuscate", "lock a BENCH netlist");
	std::string ob_method = "sc", ob_in, ob_out, ob_report, ob_steps;
	unsigned ob_n = 2, ob_len = 7, ob_sr = 1, ob_extra = 2;
	std::uint64_t ob_seed = 1;
	std::optional<double> ob_slack;
	ob->add_option("--method", ob_method, "sc|lfn|srlatch|template|composite")->capture_default_str();
	ob->add_option("--n", ob_n, "micro cycles, network width or template count")->capture_default_str();
	ob->add_option("--mc-len", ob_len, "gates per micro cycle")->capture_default_str();
	ob->add_option("--sr", ob_sr, "latch count")->capture_default_str();
	ob->add_option("--extra-edges", ob_extra, "cross edges per micro cycle")->capture_default_str();
	ob->add_option("--seed", ob_seed)->capture_default_str();
	ob->add_option("--slack-budget", ob_slack, "percent of critical path allowed to grow");
	ob->add_option("--steps", ob_steps, "JSON array of step configs for composite");
	ob->add_option("--in", ob_in)->required();
	ob->add_option("--out", ob_out, "locked BENCH (stdout if omitted)");
	ob->add_option("--report", ob_report, "report JSON (stderr if omitted)");

	// attack
	auto* at = app.add_subcommand("attack", "recover a key");
	std::string at_mode = "sat", at_nc = "auto", at_trav = "per-cycle", at_oracle, at_cmd, at_locked, at_out;
	double at_pre = 60, at_to = 300, at_call = 0;
	std::uint64_t at_seed = 1;
	std::size_t at_iters = 100000;
	bool at_ext = false;
	at->add_option("--mode", at_mode, "sat|cycsat|besat|reduction")->capture_default_str();
	at->add_option("--nc", at_nc, "structural|sensitizable|auto")->capture_default_str();
	at->add_option("--traversal", at_trav, "per-cycle|per-feedback|per-feedback-rule-i")->capture_default_str();
	auto* o1 = at->add_option("--oracle", at_oracle, "original BENCH used as oracle");
	auto* o2 = at->add_option("--oracle-cmd", at_cmd, "external oracle process (Q/A hex lines)");
	o1->excludes(o2);
	at->add_option("--locked", at_locked)->required();
	at->add_option("--preprocess-timeout", at_pre)->capture_default_str();
	at->add_option("--timeout", at_to)->capture_default_str();
	at->add_option("--call-timeout", at_call, "per solver call, 0 = none")->capture_default_str();
	at->add_option("--max-iterations", at_iters)->capture_default_str();
	at->add_option("--seed", at_seed)->capture_default_str();
	at->add_flag("--external-solver", at_ext, "solve through $CYCLOCK_SAT_CMD");
	at->add_option("--out", at_out, "result JSON (stdout if omitted)");

	// cycles
	auto* cy = app.add_subcommand("cycles", "enumerate elementary cycles");
	std::string cy_in, cy_nc, cy_trav = "per-cycle";
	std::uint64_t cy_max = 0;
	double cy_to = 0;
	bool cy_rc = false, cy_dimacs = false;
	cy->add_option("--in", cy_in)->required();
	cy->add_option("--max", cy_max, "stop after this many cycles (0 = all)");
	cy->add_option("--timeout", cy_to);
	cy->add_option("--nc", cy_nc, "also emit no-cycle clauses: structural|sensitizable");
	cy->add_option("--traversal", cy_trav)->capture_default_str();
	cy->add_flag("--dimacs", cy_dimacs, "include key-only clauses as DIMACS");
	cy->add_flag("--rc", cy_rc, "also build reducible-cycle clauses");

	// verify
	auto* ve = app.add_subcommand("verify", "check a key against the original");
	std::string ve_orig, ve_locked, ve_key;
	std::uint64_t ve_seed = 1;
	ve->add_option("--original", ve_orig)->required();
	ve->add_option("--locked", ve_locked)->required();
	ve->add_option("--key", ve_key, "bit string, JSON, or file")->required();
	ve->add_option("--seed", ve_seed)->capture_default_str();

	// sta
	auto* st = app.add_subcommand("sta", "static timing");
	std::string st_in, st_delays, st_key;
	st->add_option("--in", st_in)->required();
	st->add_option("--delays", st_delays, "delay model JSON file");
	st->add_option("--key", st_key, "evaluate the keyed configuration");

	// simulate
	auto* si = app.add_subcommand("simulate", "evaluate one input vector");
	std::string si_in, si_vec, si_key;
	si->add_option("--in", si_in)->required();
	si->add_option("--input", si_vec, "hex, bit i has weight 2^i")->required();
	si->add_option("--key", si_key);

	// oracle-serve
	auto* os = app.add_subcommand("oracle-serve", "answer Q <hex> lines on stdin with A <hex>");
	std::string os_in;
	os->add_option("--in", os_in)->required();

	// table
	auto* ta = app.add_subcommand("table", "run an experiment grid");
	std::string ta_spec, ta_fmt, ta_out;
	ta->add_option("--spec", ta_spec, "JSON spec file")->required();
	ta->add_option("--format", ta_fmt, "markdown|csv");
	ta->add_option("--out", ta_out);

	// lfn-bound
	auto* lb = app.add_subcommand("lfn-bound", "cycle lower bound of a feedback network");
	std::vector<unsigned> lb_m{2, 4, 8, 16};
	lb->add_option("m", lb_m)->capture_default_str();

	// gen-toy
	auto* gt = app.add_subcommand("gen-toy", "random acyclic benchmark");
	unsigned gt_in = 12, gt_gates = 120, gt_outs = 8;
	std::uint64_t gt_seed = 1;
	std::string gt_out;
	gt->add_option("--inputs", gt_in)->capture_default_str();
	gt->add_option("--gates", gt_gates)->capture_default_str();
	gt->add_option("--outputs", gt_outs)->capture_default_str();
	gt->add_option("--seed", gt_seed)->capture_default_str();
	gt->add_option("--out", gt_out);

	// solve
	auto* so = app.add_subcommand("solve", "solve a DIMACS file");
	std::string so_in;
	double so_to = 0;
	so->add_option("file", so_in)->required();
	so->add_option("--timeout", so_to);

	// dump-graph
	auto* dg = app.add_subcommand("dump-graph", "gate graph as JSON");
	std::string dg_in;
	dg->add_option("--in", dg_in)->required();

	try {
		app.parse(argc, argv);
	} catch (const CLI::Success& e) {
		return app.exit(e);
	} catch (const CLI::ParseError& e) {
		app.exit(e);
		return kConfig;
	}

	try {
		if (*ob) {
			auto n = load(ob_in);
			json c{{"method", ob_method}, {"n", ob_n}, {"mc_length", ob_len}, {"sr", ob_sr}, {"extra_edges", ob_extra}, {"seed", ob_seed}};
			if (ob_slack) c["slack_budget"] = *ob_slack;
			if (!ob_steps.empty()) {
				try {
					c["steps"] = json::parse(ob_steps);
				} catch (const json::exception& e) {
					std::cerr << "cyclock: --steps: " << e.what() << "\n";
					return kConfig;
				}
			}
			cyclock_netlist* locked = nullptr;
			char* rep = nullptr;
			check(cyclock_obfuscate(n.get(), c.dump().c_str(), &locked, &rep));
			NetPtr lp(locked);
			std::string report = take(rep);
			if (ob_out.empty()) {
				char* txt = nullptr;
				check(cyclock_netlist_serialize(lp.get(), &txt));
				std::cout << take(txt);
			} else {
				check(cyclock_netlist_save(lp.get(), ob_out.c_str()));
			}
			if (ob_report.empty())
				std::cerr << report << "\n";
			else
				emit(report, ob_report);
			return kOk;
		}
		if (*at) {
			if (at_oracle.empty() && at_cmd.empty()) {
				std::cerr << "cyclock: attack needs --oracle or --oracle-cmd\n";
				return kConfig;
			}
			auto locked = load(at_locked);
			NetPtr orig;
			if (!at_oracle.empty()) orig = load(at_oracle);
			json c{{"mode", at_mode},       {"nc", at_nc},          {"traversal", at_trav},
			       {"preprocess_timeout", at_pre}, {"timeout", at_to}, {"call_timeout", at_call},
			       {"max_iterations", at_iters},   {"seed", at_seed},  {"external_solver", at_ext}};
			char* res = nullptr;
			cyclock_attack_status s = CYCLOCK_DEADLINE;
			check(cyclock_attack(locked.get(), orig.get(), at_cmd.empty() ? nullptr : at_cmd.c_str(), c.dump().c_str(), &res, &s));
			emit(take(res), at_out);
			switch (s) {
			case CYCLOCK_KEY_FOUND: return kOk;
			case CYCLOCK_UNSAT: return kUnsat;
			default: return kTimeout;
			}
		}
		if (*cy) {
			auto n = load(cy_in);
			json o = json::object();
			if (cy_max) o["max_count"] = cy_max;
			if (cy_to > 0) o["timeout"] = cy_to;
			if (!cy_nc.empty()) {
				o["nc"] = cy_nc;
				o["traversal"] = cy_trav;
				o["dimacs"] = cy_dimacs;
			}
			o["rc"] = cy_rc;
			char* res = nullptr;
			check(cyclock_cycles(n.get(), o.dump().c_str(), &res));
			emit(take(res), "");
			return kOk;
		}
		if (*ve) {
			auto o = load(ve_orig);
			auto l = load(ve_locked);
			std::string k = key_text(ve_key);
			int eq = 0;
			char* res = nullptr;
			check(cyclock_verify(o.get(), l.get(), k.c_str(), ve_seed, &eq, &res));
			emit(take(res), "");
			return eq ? kOk : kUnsat;
		}
		if (*st) {
			auto n = load(st_in);
			std::string d = st_delays.empty() ? "" : slurp(st_delays);
			std::string k = key_text(st_key);
			char* res = nullptr;
			check(cyclock_sta(n.get(), d.empty() ? nullptr : d.c_str(), k.empty() ? nullptr : k.c_str(), &res));
			emit(take(res), "");
			return kOk;
		}
		if (*si) {
			auto n = load(si_in);
			std::string k = key_text(si_key);
			char* res = nullptr;
			check(cyclock_simulate(n.get(), si_vec.c_str(), k.empty() ? nullptr : k.c_str(), &res));
			emit(take(res), "");
			return kOk;
		}
		if (*os) {
			auto n = load(os_in);
			cyclock_oracle* o = nullptr;
			check(cyclock_oracle_new(n.get(), &o));
			std::unique_ptr<cyclock_oracle, void (*)(cyclock_oracle*)> op(o, cyclock_oracle_free);
			std::string line;
			while (std::getline(std::cin, line)) {
				if (line.empty()) continue;
				if (line.rfind("Q ", 0) != 0) {
					std::cerr << "cyclock: bad query line\n";
					return kIo;
				}
				char* out = nullptr;
				check(cyclock_oracle_query(o, line.c_str() + 2, &out));
				std::cout << "A " << take(out) << std::endl;
			}
			return kOk;
		}
		if (*ta) {
			json spec;
			try {
				spec = json::parse(slurp(ta_spec));
			} catch (const json::exception& e) {
				std::cerr << "cyclock: " << ta_spec << ": " << e.what() << "\n";
				return kConfig;
			}
			if (!ta_fmt.empty()) spec["format"] = ta_fmt;
			char* res = nullptr;
			check(cyclock_table(spec.dump().c_str(), &res));
			emit(take(res), ta_out);
			return kOk;
		}
		if (*lb) {
			for (unsigned m : lb_m) {
				char* res = nullptr;
				check(cyclock_lfn_bound(m, &res));
				std::cout << m << " " << take(res) << "\n";
			}
			return kOk;
		}
		if (*gt) {
			json p{{"inputs", gt_in}, {"gates", gt_gates}, {"outputs", gt_outs}, {"seed", gt_seed}};
			cyclock_netlist* n = nullptr;
			check(cyclock_gen_toy(p.dump().c_str(), &n));
			NetPtr np(n);
			if (gt_out.empty()) {
				char* txt = nullptr;
				check(cyclock_netlist_serialize(np.get(), &txt));
				std::cout << take(txt);
			} else {
				check(cyclock_netlist_save(np.get(), gt_out.c_str()));
			}
			return kOk;
		}
		if (*so) {
			std::string text = slurp(so_in);
			char* res = nullptr;
			check(cyclock_solve_dimacs(text.c_str(), so_to, &res));
			std::cout << take(res);
			return kOk;
		}
		if (*dg) {
			auto n = load(dg_in);
			char* res = nullptr;
			check(cyclock_netlist_dump_graph(n.get(), &res));
			emit(take(res), "");
			return kOk;
		}
	} catch (const Failure& f) {
		return f.code;
	}
	return kOk;
}
