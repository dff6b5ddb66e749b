#include "cyclock/report.hpp"

#include "cyclock/timing.hpp"

#include <cstdio>
#include <sstream>

namespace cyclock {

using nlohmann::json;

const char* version() { return CYCLOCK_VERSION; }

std::string config_hash(const json& j) {
	std::uint64_t h = 1469598103934665603ull;
	for (unsigned char ch : j.dump()) {
		h ^= ch;
		h *= 1099511628211ull;
	}
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
	return buf;
}

std::optional<NcCondition> nc_condition_from_name(const std::string& s) {
	if (s == "structural") return NcCondition::Structural;
	if (s == "sensitizable") return NcCondition::Sensitizable;
	return std::nullopt;
}

std::optional<Traversal> traversal_from_name(const std::string& s) {
	if (s == "per-cycle") return Traversal::PerCycle;
	if (s == "per-feedback" || s == "per-feedback-rule-ii") return Traversal::PerFeedbackRuleII;
	if (s == "per-feedback-rule-i") return Traversal::PerFeedbackRuleI;
	return std::nullopt;
}

json to_json(const ObfuscationConfig& c) {
	json j{{"method", to_string(c.method)}, {"n", c.n},         {"mc_length", c.mc_length}, {"sr", c.sr_count},
	       {"extra_edges", c.extra_edges}, {"seed", c.seed}, {"saturate", c.saturate}};
	if (c.slack_budget_percent) j["slack_budget"] = *c.slack_budget_percent;
	if (!c.steps.empty()) {
		j["steps"] = json::array();
		for (const auto& s : c.steps) j["steps"].push_back(to_json(s));
	}
	return j;
}

ObfuscationConfig obfuscation_config_from_json(const json& j) {
	ObfuscationConfig c;
	if (!j.is_object()) throw ConfigError("obfuscation config must be an object");
	if (j.contains("method")) {
		auto m = method_from_name(j["method"].get<std::string>());
		if (!m) throw ConfigError("unknown method: " + j["method"].get<std::string>());
		c.method = *m;
	}
	c.n = j.value("n", c.n);
	c.mc_length = j.value("mc_length", c.mc_length);
	c.sr_count = j.value("sr", c.sr_count);
	c.extra_edges = j.value("extra_edges", c.extra_edges);
	c.seed = j.value("seed", c.seed);
	c.saturate = j.value("saturate", false);
	if (j.contains("slack_budget") && !j["slack_budget"].is_null()) c.slack_budget_percent = j["slack_budget"].get<double>();
	if (j.contains("steps"))
		for (const auto& s : j["steps"]) {
			json t = s;
			if (!t.contains("seed")) t["seed"] = c.seed;
			c.steps.push_back(obfuscation_config_from_json(t));
		}
	return c;
}

json to_json(const ObfuscationReport& r) {
	json key = json::object();
	for (const auto& [k, v] : r.key) key[k] = v ? 1 : 0;
	return {{"schema", kSchema},
	        {"method", r.method},
	        {"seed", r.seed},
	        {"key", key},
	        {"m", r.m},
	        {"muxes", r.muxes},
	        {"added_gates", r.added_gates},
	        {"original_gates", r.original_gates},
	        {"overhead_pct", r.overhead_pct},
	        {"cycle_lower_bound", r.cycle_lower_bound},
	        {"latches", r.latches},
	        {"templates", r.templates},
	        {"notes", r.notes}};
}

ObfuscationReport obfuscation_report_from_json(const json& j) {
	ObfuscationReport r;
	r.method = j.value("method", "");
	r.seed = j.value("seed", std::uint64_t{0});
	if (j.contains("key"))
		for (auto& [k, v] : j["key"].items()) r.key[k] = v.is_boolean() ? v.get<bool>() : v.get<int>() != 0;
	r.m = j.value("m", std::size_t{0});
	r.muxes = j.value("muxes", std::size_t{0});
	r.added_gates = j.value("added_gates", std::size_t{0});
	r.original_gates = j.value("original_gates", std::size_t{0});
	r.overhead_pct = j.value("overhead_pct", 0.0);
	r.cycle_lower_bound = j.value("cycle_lower_bound", "0");
	r.latches = j.value("latches", std::size_t{0});
	r.templates = j.value("templates", std::size_t{0});
	return r;
}

json to_json(const AttackConfig& c) {
	json j{{"mode", to_string(c.mode)},
	       {"traversal", c.traversal == Traversal::PerCycle ? "per-cycle"
	                     : c.traversal == Traversal::PerFeedbackRuleII ? "per-feedback"
	                                                                    : "per-feedback-rule-i"},
	       {"preprocess_timeout", c.preprocess_timeout},
	       {"timeout", c.timeout},
	       {"call_timeout", c.call_timeout},
	       {"max_iterations", c.max_iterations},
	       {"seed", c.seed},
	       {"external_solver", c.external_solver}};
	j["nc"] = c.nc ? json(to_string(*c.nc)) : json("auto");
	return j;
}

AttackConfig attack_config_from_json(const json& j) {
	AttackConfig c;
	if (!j.is_object()) throw ConfigError("attack config must be an object");
	if (j.contains("mode")) {
		auto m = attack_mode_from_name(j["mode"].get<std::string>());
		if (!m) throw ConfigError("unknown attack mode: " + j["mode"].get<std::string>());
		c.mode = *m;
	}
	if (j.contains("nc") && j["nc"].get<std::string>() != "auto") {
		auto v = nc_condition_from_name(j["nc"].get<std::string>());
		if (!v) throw ConfigError("unknown nc condition: " + j["nc"].get<std::string>());
		c.nc = *v;
	}
	if (j.contains("traversal")) {
		auto t = traversal_from_name(j["traversal"].get<std::string>());
		if (!t) throw ConfigError("unknown traversal: " + j["traversal"].get<std::string>());
		c.traversal = *t;
	}
	c.preprocess_timeout = j.value("preprocess_timeout", c.preprocess_timeout);
	c.timeout = j.value("timeout", c.timeout);
	c.call_timeout = j.value("call_timeout", c.call_timeout);
	c.max_iterations = j.value("max_iterations", c.max_iterations);
	c.seed = j.value("seed", c.seed);
	c.external_solver = j.value("external_solver", false);
	if (!(c.preprocess_timeout > 0) || !(c.timeout > 0)) throw ConfigError("deadlines must be positive");
	return c;
}

static json key_json(const KeyAssignment& k) {
	json o = json::object();
	for (const auto& [a, b] : k) o[a] = b ? 1 : 0;
	return o;
}

json to_json(const AttackResult& r) {
	json j{{"schema", kSchema},
	       {"status", to_string(r.status)},
	       {"dip_count", r.dip_count},
	       {"timings", {{"preprocess", r.preprocess_seconds}, {"solve", r.solve_seconds}}},
	       {"cycles", {{"count", r.cycles}, {"truncated", r.cycles_truncated}}},
	       {"constraint_clauses", r.constraint_clauses},
	       {"notes", r.notes}};
	j["key"] = r.key ? key_json(*r.key) : json(nullptr);
	j["banned"] = json::array();
	for (const auto& b : r.banned) j["banned"].push_back(key_json(b));
	if (!r.nc_condition.empty()) j["nc_condition"] = r.nc_condition;
	if (!r.trap_reason.empty()) j["trap_reason"] = r.trap_reason;
	return j;
}

json to_json(const CycleSet& s) {
	json h = json::object();
	for (auto [len, cnt] : s.histogram) h[std::to_string(len)] = cnt;
	return {{"schema", kSchema}, {"count", s.count}, {"truncated", s.truncated}, {"histogram", h}};
}

json to_json(const KeyVerdict& v) {
	json j{{"schema", kSchema}, {"equivalent", v.equivalent}, {"stateful", v.stateful}, {"method", v.method}};
	if (v.witness) {
		j["witness"] = to_hex(*v.witness);
	}
	return j;
}

ToyParams toy_params_from_json(const json& j) {
	ToyParams p;
	p.inputs = j.value("inputs", p.inputs);
	p.gates = j.value("gates", p.gates);
	p.max_outputs = j.value("outputs", p.max_outputs);
	p.seed = j.value("seed", p.seed);
	if (p.inputs == 0 || p.gates == 0) throw ConfigError("toy needs inputs and gates");
	return p;
}

KeyAssignment key_from_json(const Netlist& n, const json& j) {
	KeyAssignment k;
	if (j.is_string()) {
		auto s = j.get<std::string>();
		auto keys = n.key_inputs();
		if (s.size() != keys.size()) throw ConfigError("key bit string has wrong width");
		for (std::size_t i = 0; i < keys.size(); ++i) {
			if (s[i] != '0' && s[i] != '1') throw ConfigError("key bit string must be 0/1");
			k[n.net(keys[i]).name] = s[i] == '1';
		}
		return k;
	}
	const json& src = j.contains("key") ? j["key"] : j;
	for (auto& [a, b] : src.items()) k[a] = b.is_boolean() ? b.get<bool>() : b.get<int>() != 0;
	for (NetId kn : n.key_inputs())
		if (!k.count(n.net(kn).name)) throw ConfigError("key misses " + n.net(kn).name);
	return k;
}

// ---------------------------------------------------------------- tables

namespace {

struct Table {
	std::vector<std::string> header;
	std::vector<std::vector<std::string>> rows;

	std::string render(const std::string& fmt) const {
		std::ostringstream os;
		if (fmt == "csv") {
			auto line = [&](const std::vector<std::string>& r) {
				for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
				os << "\n";
			};
			line(header);
			for (const auto& r : rows) line(r);
			return os.str();
		}
		auto line = [&](const std::vector<std::string>& r) {
			os << "|";
			for (const auto& c : r) os << " " << c << " |";
			os << "\n";
		};
		line(header);
		os << "|";
		for (std::size_t i = 0; i < header.size(); ++i) os << "---|";
		os << "\n";
		for (const auto& r : rows) line(r);
		return os.str();
	}
};

std::string cell(AttackStatus s) {
	switch (s) {
	case AttackStatus::KeyFound: return "ok";
	case AttackStatus::Unsat: return "UNSAT";
	case AttackStatus::TrapDetected: return "Inf";
	case AttackStatus::PreprocessTimeout:
	case AttackStatus::Deadline: return "t/o";
	}
	return "?";
}

std::vector<std::uint64_t> seeds_of(const json& spec) {
	std::vector<std::uint64_t> s = spec.value("seeds", std::vector<std::uint64_t>{1});
	if (s.empty()) throw ConfigError("no seeds");
	return s;
}

} // namespace

std::string run_table(const json& spec) {
	std::string kind = spec.value("kind", "");
	std::string fmt = spec.value("format", "markdown");
	Table t;
	if (kind == "lfn-bound") {
		t.header = {"m", "lower bound"};
		for (unsigned m : spec.value("m", std::vector<unsigned>{2, 4, 8, 16})) t.rows.push_back({std::to_string(m), lfn_lower_bound(m).str()});
	} else if (kind == "sc-cycles") {
		auto ms = spec.value("m", std::vector<unsigned>{1, 2, 3, 4, 5, 6});
		t.header = {"seed"};
		for (unsigned m : ms) t.header.push_back("m=" + std::to_string(m));
		std::uint64_t cap = spec.value("cycle_cap", std::uint64_t{1000000});
		double timeout = spec.value("timeout", 10.0);
		for (auto seed : seeds_of(spec)) {
			std::vector<std::string> row{std::to_string(seed)};
			for (unsigned m : ms) {
				ToyParams tp = toy_params_from_json(spec.value("toy", json::object()));
				tp.seed = seed;
				Netlist base = make_toy(tp);
				ObfuscationConfig c;
				c.method = Method::SC;
				c.n = m;
				c.seed = seed;
				c.extra_edges = spec.value("extra_edges", 2u);
				try {
					auto locked = build_super_cycle(base, c);
					auto cs = enumerate_cycles(locked.netlist, cap, Deadline::after(timeout), false);
					row.push_back(cs.truncated ? (cs.count >= cap ? ">=" + std::to_string(cs.count) : "t/o") : std::to_string(cs.count));
				} catch (const NiSError&) {
					row.push_back("NiS");
				}
			}
			t.rows.push_back(row);
		}
	} else if (kind == "attacks") {
		auto locks = spec.at("locks");
		auto attacks = spec.at("attacks");
		t.header = {"lock", "seed"};
		for (const auto& a : attacks) t.header.push_back(a.value("label", "attack"));
		for (const auto& l : locks)
			for (auto seed : seeds_of(spec)) {
				ToyParams tp = toy_params_from_json(spec.value("toy", json::object()));
				tp.seed = seed;
				Netlist base = make_toy(tp);
				json lc = l.at("config");
				lc["seed"] = seed;
				std::vector<std::string> row{l.value("label", "lock"), std::to_string(seed)};
				Locked locked;
				try {
					locked = obfuscate(base, obfuscation_config_from_json(lc));
				} catch (const NiSError&) {
					for (std::size_t i = 0; i < attacks.size(); ++i) row.push_back("NiS");
					t.rows.push_back(row);
					continue;
				}
				for (const auto& a : attacks) {
					json ac = a.at("config");
					ac["seed"] = seed;
					NetlistOracle o(base);
					auto r = run_attack(locked.netlist, o, attack_config_from_json(ac));
					std::string s = cell(r.status);
					if (r.status == AttackStatus::KeyFound && r.key && !verify_key(base, locked.netlist, *r.key).equivalent) s = "wrong";
					if (!r.banned.empty()) s += " (banned " + std::to_string(r.banned.size()) + ")";
					row.push_back(s);
				}
				t.rows.push_back(row);
			}
	} else if (kind == "timing") {
		auto budgets = spec.value("budgets", std::vector<double>{0, 5});
		t.header = {"seed", "original"};
		for (double b : budgets) t.header.push_back("slack " + std::to_string(static_cast<int>(b)) + "%");
		for (auto seed : seeds_of(spec)) {
			ToyParams tp = toy_params_from_json(spec.value("toy", json::object()));
			tp.seed = seed;
			Netlist base = make_toy(tp);
			DelayModel d;
			std::vector<std::string> row{std::to_string(seed), std::to_string(static_cast<long long>(sta(base, d).critical))};
			for (double b : budgets) {
				ObfuscationConfig c;
				c.method = Method::SC;
				c.seed = seed;
				c.saturate = true;
				c.slack_budget_percent = b;
				auto l = timing_aware_obfuscate(base, c, d);
				row.push_back(std::to_string(static_cast<long long>(sta(l.netlist, d, std::nullopt, l.report.key).critical)) + " (" +
				              std::to_string(l.report.m) + " fb)");
			}
			t.rows.push_back(row);
		}
	} else {
		throw ConfigError("unknown table kind: " + kind);
	}
	return t.render(fmt);
}

} // namespace cyclock
