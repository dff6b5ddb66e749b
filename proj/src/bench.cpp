#include "cyclock/bench.hpp"

#include <fstream>
#include <sstream>

namespace cyclock {

namespace {

std::string_view trim(std::string_view s) {
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
	return s;
}

bool valid_name(std::string_view s) {
	if (s.empty()) return false;
	for (char c : s)
		if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' || c == '=') return false;
	return true;
}

// "KEYWORD(args)" -> keyword, args; returns false if not of that shape
bool split_call(std::string_view s, std::string_view& head, std::string_view& args) {
	auto open = s.find('(');
	if (open == std::string_view::npos || s.back() != ')') return false;
	head = trim(s.substr(0, open));
	args = s.substr(open + 1, s.size() - open - 2);
	return true;
}

} // namespace

Netlist parse_bench(std::string_view text) {
	Netlist n;
	std::unordered_map<NetId, int> first_use;
	std::vector<std::pair<NetId, int>> outputs;
	int lineno = 0;
	std::size_t pos = 0;
	auto use = [&](std::string_view name, int line) {
		NetId id = n.get_or_add_net(std::string(name));
		first_use.emplace(id, line);
		return id;
	};
	while (pos <= text.size()) {
		auto nl = text.find('\n', pos);
		if (nl == std::string_view::npos) nl = text.size();
		std::string_view line = text.substr(pos, nl - pos);
		pos = nl + 1;
		++lineno;
		if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
		line = trim(line);
		if (line.empty()) continue;

		std::string_view head, args;
		auto eq = line.find('=');
		try {
			if (eq == std::string_view::npos) {
				if (!split_call(line, head, args)) throw NetlistError("syntax error", lineno);
				std::string kw(head);
				for (auto& c : kw) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
				std::string_view name = trim(args);
				if (!valid_name(name)) throw NetlistError("bad net name", lineno);
				if (kw == "INPUT") {
					n.add_input(std::string(name));
				} else if (kw == "OUTPUT") {
					outputs.emplace_back(use(name, lineno), lineno);
				} else {
					throw NetlistError("unknown declaration '" + kw + "'", lineno);
				}
				continue;
			}
			std::string_view lhs = trim(line.substr(0, eq));
			std::string_view rhs = trim(line.substr(eq + 1));
			if (!valid_name(lhs) || !split_call(rhs, head, args)) throw NetlistError("syntax error", lineno);
			auto f = func_from_name(head);
			if (!f) throw NetlistError("unknown gate function '" + std::string(head) + "'", lineno);
			std::vector<NetId> ins;
			std::size_t p = 0;
			while (p <= args.size()) {
				auto c = args.find(',', p);
				if (c == std::string_view::npos) c = args.size();
				std::string_view a = trim(args.substr(p, c - p));
				p = c + 1;
				if (a.empty() && ins.empty() && c == args.size()) break;
				if (!valid_name(a)) throw NetlistError("bad net name in argument list", lineno);
				ins.push_back(use(a, lineno));
			}
			NetId out = n.get_or_add_net(std::string(lhs));
			n.add_gate(*f, std::move(ins), out);
		} catch (const NetlistError& e) {
			if (e.line() > 0) throw;
			throw NetlistError(e.what(), lineno);
		}
	}
	for (const auto& [id, line] : outputs) n.add_output(id);
	for (NetId id = 0; id < n.num_nets(); ++id) {
		const Net& net = n.net(id);
		if (net.kind == NetKind::Internal && net.driver == kNone) {
			auto it = first_use.find(id);
			throw NetlistError("undeclared net '" + net.name + "'", it == first_use.end() ? 0 : it->second);
		}
	}
	return n;
}

Netlist load_bench(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot open '" + path + "'");
	std::stringstream ss;
	ss << in.rdbuf();
	return parse_bench(ss.str());
}

std::string serialize_bench(const Netlist& n, bool decompose_mux) {
	std::ostringstream os;
	for (NetId i : n.inputs()) os << "INPUT(" << n.net(i).name << ")\n";
	for (NetId o : n.outputs()) os << "OUTPUT(" << n.net(o).name << ")\n";
	// names generated for mux decomposition must not collide with existing nets
	Netlist names = n;
	for (const Gate& g : n.gates()) {
		const std::string& y = n.net(g.output).name;
		auto nm = [&](NetId id) -> const std::string& { return n.net(id).name; };
		if (g.func == GateFunc::Mux && decompose_mux) {
			std::string ns = names.fresh_name(y + "_ns");
			names.add_net(ns);
			std::string t0 = names.fresh_name(y + "_a");
			names.add_net(t0);
			std::string t1 = names.fresh_name(y + "_b");
			names.add_net(t1);
			os << ns << " = NOT(" << nm(g.inputs[0]) << ")\n";
			os << t0 << " = AND(" << nm(g.inputs[1]) << ", " << ns << ")\n";
			os << t1 << " = AND(" << nm(g.inputs[2]) << ", " << nm(g.inputs[0]) << ")\n";
			os << y << " = OR(" << t0 << ", " << t1 << ")\n";
			continue;
		}
		os << y << " = " << func_name(g.func) << "(";
		for (std::size_t i = 0; i < g.inputs.size(); ++i) os << (i ? ", " : "") << nm(g.inputs[i]);
		os << ")\n";
	}
	return os.str();
}

void save_bench(const Netlist& n, const std::string& path, bool decompose_mux) {
	std::ofstream out(path);
	if (!out) throw std::runtime_error("cannot write '" + path + "'");
	out << serialize_bench(n, decompose_mux);
}

} // namespace cyclock
