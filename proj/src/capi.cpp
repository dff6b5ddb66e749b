#define CYCLOCK_BUILDING
#include "cyclock/cyclock.h"

#include "cyclock/attacks.hpp"
#include "cyclock/bench.hpp"
#include "cyclock/cnf.hpp"
#include "cyclock/graph.hpp"
#include "cyclock/report.hpp"
#include "cyclock/timing.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

using nlohmann::json;
namespace cl = cyclock;

struct cyclock_netlist {
	cl::Netlist n;
};

struct cyclock_oracle {
	std::unique_ptr<cl::NetlistOracle> o;
	std::size_t width;
};

namespace {

thread_local std::string g_error;

struct IoError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

char* dup(const std::string& s) {
	char* p = static_cast<char*>(std::malloc(s.size() + 1));
	if (!p) throw std::bad_alloc();
	std::memcpy(p, s.c_str(), s.size() + 1);
	return p;
}

json parse_json(const char* s, const char* what) {
	if (!s || !*s) return json::object();
	try {
		return json::parse(s);
	} catch (const json::exception& e) {
		throw cl::ConfigError(std::string(what) + ": " + e.what());
	}
}

template <class F>
cyclock_error guard(F&& f) {
	try {
		f();
		g_error.clear();
		return CYCLOCK_OK;
	} catch (const cl::NetlistError& e) {
		g_error = e.what();
		return CYCLOCK_E_PARSE;
	} catch (const IoError& e) {
		g_error = e.what();
		return CYCLOCK_E_IO;
	} catch (const cl::NiSError& e) {
		g_error = e.what();
		return CYCLOCK_E_NIS;
	} catch (const cl::ConfigError& e) {
		g_error = e.what();
		return CYCLOCK_E_CONFIG;
	} catch (const json::exception& e) {
		g_error = e.what();
		return CYCLOCK_E_CONFIG;
	} catch (const std::invalid_argument& e) {
		g_error = e.what();
		return CYCLOCK_E_ARG;
	} catch (const std::exception& e) {
		g_error = e.what();
		return CYCLOCK_E_INTERNAL;
	} catch (...) {
		g_error = "unknown error";
		return CYCLOCK_E_INTERNAL;
	}
}

void need(const void* p, const char* what) {
	if (!p) throw std::invalid_argument(std::string(what) + " is null");
}

cl::KeyAssignment key_arg(const cl::Netlist& n, const char* key_json) {
	if (!key_json || !*key_json) return {};
	std::string s(key_json);
	if (s.find_first_not_of("01") == std::string::npos) return cl::key_from_json(n, json(s));
	return cl::key_from_json(n, parse_json(key_json, "key"));
}

json netlist_stats(const cl::Netlist& n) {
	return {{"schema", cl::kSchema},
	        {"inputs", n.primary_inputs().size()},
	        {"keys", n.key_inputs().size()},
	        {"outputs", n.outputs().size()},
	        {"gates", n.num_gates()},
	        {"nets", n.num_nets()},
	        {"acyclic", cl::is_acyclic(n)}};
}

std::string lit_text(const cl::Netlist& n, const cl::NcClause& c) {
	std::string s;
	for (std::size_t i = 0; i < c.size(); ++i) {
		if (i) s += " | ";
		s += (c[i].value ? "" : "!") + n.net(c[i].net).name;
	}
	return s.empty() ? "false" : s;
}

cyclock_attack_status status_code(cl::AttackStatus s) {
	switch (s) {
	case cl::AttackStatus::KeyFound: return CYCLOCK_KEY_FOUND;
	case cl::AttackStatus::Unsat: return CYCLOCK_UNSAT;
	case cl::AttackStatus::PreprocessTimeout: return CYCLOCK_PREPROCESS_TIMEOUT;
	case cl::AttackStatus::TrapDetected: return CYCLOCK_TRAP_DETECTED;
	case cl::AttackStatus::Deadline: return CYCLOCK_DEADLINE;
	}
	return CYCLOCK_DEADLINE;
}

} // namespace

extern "C" {

const char* cyclock_version(void) { return cl::version(); }
const char* cyclock_last_error(void) { return g_error.c_str(); }
void cyclock_free_string(char* s) { std::free(s); }

cyclock_error cyclock_netlist_parse(const char* text, cyclock_netlist** out) {
	return guard([&] {
		need(text, "text");
		need(out, "out");
		*out = new cyclock_netlist{cl::parse_bench(text)};
	});
}

cyclock_error cyclock_netlist_load(const char* path, cyclock_netlist** out) {
	return guard([&] {
		need(path, "path");
		need(out, "out");
		std::ifstream in(path);
		if (!in) throw IoError(std::string("cannot open '") + path + "'");
		std::stringstream ss;
		ss << in.rdbuf();
		*out = new cyclock_netlist{cl::parse_bench(ss.str())};
	});
}

void cyclock_netlist_free(cyclock_netlist* n) { delete n; }

cyclock_error cyclock_netlist_save(const cyclock_netlist* n, const char* path) {
	return guard([&] {
		need(n, "netlist");
		need(path, "path");
		std::ofstream o(path);
		if (!o) throw IoError(std::string("cannot write '") + path + "'");
		o << cl::serialize_bench(n->n);
		if (!o) throw IoError(std::string("write failed for '") + path + "'");
	});
}

cyclock_error cyclock_netlist_serialize(const cyclock_netlist* n, char** text) {
	return guard([&] {
		need(n, "netlist");
		need(text, "out");
		*text = dup(cl::serialize_bench(n->n));
	});
}

cyclock_error cyclock_netlist_stats(const cyclock_netlist* n, char** out) {
	return guard([&] {
		need(n, "netlist");
		need(out, "out");
		*out = dup(netlist_stats(n->n).dump());
	});
}

cyclock_error cyclock_netlist_dump_graph(const cyclock_netlist* n, char** out) {
	return guard([&] {
		need(n, "netlist");
		need(out, "out");
		*out = dup(cl::dump_graph_json(n->n));
	});
}

cyclock_error cyclock_gen_toy(const char* params, cyclock_netlist** out) {
	return guard([&] {
		need(out, "out");
		*out = new cyclock_netlist{cl::make_toy(cl::toy_params_from_json(parse_json(params, "toy params")))};
	});
}

cyclock_error cyclock_obfuscate(const cyclock_netlist* n, const char* config, cyclock_netlist** locked, char** report) {
	return guard([&] {
		need(n, "netlist");
		need(locked, "locked");
		json cj = parse_json(config, "config");
		auto c = cl::obfuscation_config_from_json(cj);
		c.check();
		auto res = cl::obfuscate(n->n, c);
		json r = cl::to_json(res.report);
		r["config_hash"] = cl::config_hash(cl::to_json(c));
		r["version"] = cl::version();
		*locked = new cyclock_netlist{std::move(res.netlist)};
		if (report) *report = dup(r.dump(2));
	});
}

cyclock_error cyclock_cycles(const cyclock_netlist* n, const char* options, char** out) {
	return guard([&] {
		need(n, "netlist");
		need(out, "out");
		json o = parse_json(options, "options");
		std::uint64_t cap = o.value("max_count", cl::kUnbounded);
		double timeout = o.value("timeout", 0.0);
		auto cs = cl::enumerate_cycles(n->n, cap, cl::Deadline::after(timeout), false);
		json r = cl::to_json(cs);
		if (o.contains("nc")) {
			auto cond = cl::nc_condition_from_name(o["nc"].get<std::string>());
			if (!cond) throw cl::ConfigError("unknown nc condition");
			auto t = cl::traversal_from_name(o.value("traversal", "per-cycle"));
			if (!t) throw cl::ConfigError("unknown traversal");
			auto nc = cl::build_nc(n->n, *cond, *t, cl::Deadline::after(timeout));
			json clauses = json::array();
			for (const auto& c : nc.clauses) clauses.push_back(lit_text(n->n, c));
			r["nc"] = {{"condition", cl::to_string(*cond)},
			           {"traversal", o.value("traversal", "per-cycle")},
			           {"clauses", clauses},
			           {"hard", nc.hard},
			           {"truncated", nc.truncated}};
			if (!nc.uses_signals && o.value("dimacs", false)) r["nc"]["dimacs"] = cl::export_dimacs(cl::nc_key_cnf(n->n, nc));
		}
		if (o.value("rc", false)) {
			auto rc = cl::reduction_attack_clauses(n->n, cl::Deadline::after(timeout));
			r["rc"] = {{"entries", rc.entries.size()}, {"truncated", rc.truncated}};
		}
		*out = dup(r.dump(2));
	});
}

cyclock_error cyclock_simulate(const cyclock_netlist* n, const char* input_hex, const char* key_json, char** out) {
	return guard([&] {
		need(n, "netlist");
		need(input_hex, "input");
		need(out, "out");
		auto key = key_arg(n->n, key_json);
		auto bits = cl::from_hex(input_hex, n->n.primary_inputs().size());
		auto r = cl::evaluate_cyclic(n->n, bits, key);
		std::string tri;
		for (auto t : r.outputs) tri += cl::tri_char(t);
		json j{{"schema", cl::kSchema}, {"status", cl::to_string(r.status)}, {"outputs", tri}, {"iterations", r.iterations}};
		if (r.status == cl::EvalStatus::Stable) j["hex"] = cl::to_hex(r.bits());
		*out = dup(j.dump());
	});
}

cyclock_error cyclock_oracle_new(const cyclock_netlist* original, cyclock_oracle** out) {
	return guard([&] {
		need(original, "netlist");
		need(out, "out");
		*out = new cyclock_oracle{std::make_unique<cl::NetlistOracle>(original->n), original->n.primary_inputs().size()};
	});
}

void cyclock_oracle_free(cyclock_oracle* o) { delete o; }

cyclock_error cyclock_oracle_query(cyclock_oracle* o, const char* input_hex, char** out) {
	return guard([&] {
		need(o, "oracle");
		need(input_hex, "input");
		need(out, "out");
		*out = dup(cl::to_hex(o->o->query(cl::from_hex(input_hex, o->width))));
	});
}

cyclock_error cyclock_attack(const cyclock_netlist* locked, const cyclock_netlist* original, const char* oracle_cmd,
                             const char* config, char** out, cyclock_attack_status* status) {
	return guard([&] {
		need(locked, "locked");
		need(out, "out");
		if (!original && !(oracle_cmd && *oracle_cmd)) throw std::invalid_argument("no oracle given");
		auto c = cl::attack_config_from_json(parse_json(config, "config"));
		std::unique_ptr<cl::Oracle> o;
		if (original)
			o = std::make_unique<cl::NetlistOracle>(original->n);
		else
			o = std::make_unique<cl::ExternalOracle>(oracle_cmd, locked->n.primary_inputs().size(), locked->n.outputs().size());
		if (o->num_inputs() != locked->n.primary_inputs().size() || o->num_outputs() != locked->n.outputs().size())
			throw cl::ConfigError("oracle and locked netlist disagree on inputs/outputs");
		auto r = cl::run_attack(locked->n, *o, c);
		json j = cl::to_json(r);
		j["config"] = cl::to_json(c);
		j["config_hash"] = cl::config_hash(j["config"]);
		j["version"] = cl::version();
		j["queries"] = o->queries();
		if (status) *status = status_code(r.status);
		*out = dup(j.dump(2));
	});
}

cyclock_error cyclock_verify(const cyclock_netlist* original, const cyclock_netlist* locked, const char* key_json,
                             uint64_t seed, int* equivalent, char** out) {
	return guard([&] {
		need(original, "original");
		need(locked, "locked");
		auto v = cl::verify_key(original->n, locked->n, key_arg(locked->n, key_json), seed);
		if (equivalent) *equivalent = v.equivalent ? 1 : 0;
		if (out) *out = dup(cl::to_json(v).dump(2));
	});
}

cyclock_error cyclock_sta(const cyclock_netlist* n, const char* delay_json, const char* key_json, char** out) {
	return guard([&] {
		need(n, "netlist");
		need(out, "out");
		cl::DelayModel d = delay_json && *delay_json ? cl::DelayModel::from_json(delay_json) : cl::DelayModel{};
		auto t = cl::sta(n->n, d, std::nullopt, key_arg(n->n, key_json));
		*out = dup(cl::timing_json(n->n, t));
	});
}

cyclock_error cyclock_lfn_bound(unsigned m, char** out) {
	return guard([&] {
		need(out, "out");
		*out = dup(cl::lfn_lower_bound(m).str());
	});
}

cyclock_error cyclock_solve_dimacs(const char* dimacs, double timeout, char** out) {
	return guard([&] {
		need(dimacs, "dimacs");
		need(out, "out");
		cl::CnfFormula f;
		try {
			f = cl::parse_dimacs(dimacs);
		} catch (const std::exception& e) {
			throw cl::NetlistError(std::string("dimacs: ") + e.what());
		}
		auto r = cl::solve(f, {}, cl::Deadline::after(timeout), false);
		std::string s;
		if (r.status == cl::SatStatus::Sat) {
			s = "s SATISFIABLE\nv";
			for (int v = 1; v <= f.num_vars; ++v) s += " " + std::to_string(r.value(v) ? v : -v);
			s += " 0\n";
		} else if (r.status == cl::SatStatus::Unsat) {
			s = "s UNSATISFIABLE\n";
		} else {
			s = "s UNKNOWN\n";
		}
		*out = dup(s);
	});
}

cyclock_error cyclock_table(const char* spec, char** out) {
	return guard([&] {
		need(out, "out");
		*out = dup(cl::run_table(parse_json(spec, "table spec")));
	});
}

} // extern "C"
