#include "cyclock/netlist.hpp"

#include <algorithm>
#include <cctype>

namespace cyclock {

const char* func_name(GateFunc f) {
	switch (f) {
	case GateFunc::And: return "AND";
	case GateFunc::Nand: return "NAND";
	case GateFunc::Or: return "OR";
	case GateFunc::Nor: return "NOR";
	case GateFunc::Xor: return "XOR";
	case GateFunc::Xnor: return "XNOR";
	case GateFunc::Not: return "NOT";
	case GateFunc::Buf: return "BUF";
	case GateFunc::Mux: return "MUX";
	}
	return "?";
}

std::optional<GateFunc> func_from_name(std::string_view s) {
	std::string u(s);
	for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
	if (u == "AND") return GateFunc::And;
	if (u == "NAND") return GateFunc::Nand;
	if (u == "OR") return GateFunc::Or;
	if (u == "NOR") return GateFunc::Nor;
	if (u == "XOR") return GateFunc::Xor;
	if (u == "XNOR") return GateFunc::Xnor;
	if (u == "NOT" || u == "INV") return GateFunc::Not;
	if (u == "BUF" || u == "BUFF") return GateFunc::Buf;
	if (u == "MUX" || u == "MUX2") return GateFunc::Mux;
	return std::nullopt;
}

bool is_key_name(std::string_view name) { return name.rfind("keyinput", 0) == 0; }

NetId Netlist::add_net(const std::string& name) {
	if (by_name_.count(name)) throw NetlistError("net '" + name + "' already exists");
	NetId id = static_cast<NetId>(nets_.size());
	nets_.push_back({name, NetKind::Internal, kNone});
	by_name_.emplace(name, id);
	return id;
}

NetId Netlist::get_or_add_net(const std::string& name) {
	auto it = by_name_.find(name);
	return it != by_name_.end() ? it->second : add_net(name);
}

NetId Netlist::add_input(const std::string& name) {
	NetId id = get_or_add_net(name);
	Net& n = nets_[id];
	if (n.kind != NetKind::Internal) throw NetlistError("input '" + name + "' declared twice");
	if (n.driver != kNone) throw NetlistError("input '" + name + "' is driven by a gate");
	n.kind = is_key_name(name) ? NetKind::KeyInput : NetKind::PrimaryInput;
	inputs_.push_back(id);
	return id;
}

static void check_arity(GateFunc f, std::size_t n) {
	bool ok = true;
	switch (f) {
	case GateFunc::Not:
	case GateFunc::Buf: ok = n == 1; break;
	case GateFunc::Mux: ok = n == 3; break;
	default: ok = n >= 2; break;
	}
	if (!ok) throw NetlistError(std::string("bad arity ") + std::to_string(n) + " for " + func_name(f));
}

GateId Netlist::add_gate(GateFunc f, std::vector<NetId> inputs, NetId output) {
	check_arity(f, inputs.size());
	Net& o = nets_.at(output);
	if (o.kind != NetKind::Internal) throw NetlistError("gate drives input net '" + o.name + "'");
	if (o.driver != kNone) throw NetlistError("duplicate driver for net '" + o.name + "'");
	GateId id = static_cast<GateId>(gates_.size());
	o.driver = id;
	gates_.push_back({f, std::move(inputs), output});
	return id;
}

NetId Netlist::add_gate_net(GateFunc f, std::vector<NetId> inputs, const std::string& hint) {
	NetId out = add_net(fresh_name(hint));
	add_gate(f, std::move(inputs), out);
	return out;
}

void Netlist::add_output(NetId net) {
	if (net >= nets_.size()) throw NetlistError("output references unknown net");
	outputs_.push_back(net);
}

void Netlist::rename_net(NetId id, const std::string& name) {
	if (nets_[id].name == name) return;
	if (by_name_.count(name)) throw NetlistError("net '" + name + "' already exists");
	by_name_.erase(nets_[id].name);
	nets_[id].name = name;
	by_name_.emplace(name, id);
}

void Netlist::redirect_consumers(NetId from, NetId to, const std::vector<GateId>& keep) {
	for (GateId g = 0; g < gates_.size(); ++g) {
		if (std::find(keep.begin(), keep.end(), g) != keep.end()) continue;
		for (auto& in : gates_[g].inputs)
			if (in == from) in = to;
	}
	for (auto& o : outputs_)
		if (o == from) o = to;
}

std::string Netlist::fresh_name(const std::string& base) const {
	if (!by_name_.count(base)) return base;
	for (std::size_t i = 1;; ++i) {
		std::string s = base + "_" + std::to_string(i);
		if (!by_name_.count(s)) return s;
	}
}

std::string Netlist::next_key_name() const {
	std::size_t next = 0;
	for (NetId k : inputs_) {
		const std::string& nm = nets_[k].name;
		if (!is_key_name(nm)) continue;
		try {
			std::size_t v = std::stoul(nm.substr(8));
			next = std::max(next, v + 1);
		} catch (...) {
		}
	}
	std::string s = "keyinput" + std::to_string(next);
	while (by_name_.count(s)) s = "keyinput" + std::to_string(++next);
	return s;
}

std::vector<NetId> Netlist::primary_inputs() const {
	std::vector<NetId> r;
	for (NetId i : inputs_)
		if (nets_[i].kind == NetKind::PrimaryInput) r.push_back(i);
	return r;
}

std::vector<NetId> Netlist::key_inputs() const {
	std::vector<NetId> r;
	for (NetId i : inputs_)
		if (nets_[i].kind == NetKind::KeyInput) r.push_back(i);
	return r;
}

std::optional<NetId> Netlist::find(const std::string& name) const {
	auto it = by_name_.find(name);
	if (it == by_name_.end()) return std::nullopt;
	return it->second;
}

NetId Netlist::at(const std::string& name) const {
	auto id = find(name);
	if (!id) throw NetlistError("unknown net '" + name + "'");
	return *id;
}

bool Netlist::is_key_mux(GateId g) const {
	const Gate& gt = gates_[g];
	return gt.func == GateFunc::Mux && is_key(gt.inputs[0]);
}

void Netlist::mark(GateId g) {
	if (marks_.size() < gates_.size()) marks_.resize(gates_.size(), 0);
	marks_[g] = 1;
}

std::vector<std::vector<GateId>> Netlist::fanouts() const {
	std::vector<std::vector<GateId>> fo(nets_.size());
	for (GateId g = 0; g < gates_.size(); ++g)
		for (NetId in : gates_[g].inputs)
			if (fo[in].empty() || fo[in].back() != g) fo[in].push_back(g);
	return fo;
}

std::vector<std::vector<GateId>> Netlist::successors() const {
	auto fo = fanouts();
	std::vector<std::vector<GateId>> s(gates_.size());
	for (GateId g = 0; g < gates_.size(); ++g) s[g] = fo[gates_[g].output];
	return s;
}

std::vector<std::vector<GateId>> Netlist::predecessors() const {
	std::vector<std::vector<GateId>> p(gates_.size());
	for (GateId g = 0; g < gates_.size(); ++g) {
		for (NetId in : gates_[g].inputs) {
			GateId d = nets_[in].driver;
			if (d != kNone) p[g].push_back(d);
		}
		std::sort(p[g].begin(), p[g].end());
		p[g].erase(std::unique(p[g].begin(), p[g].end()), p[g].end());
	}
	return p;
}

void Netlist::validate() const {
	for (const Net& n : nets_) {
		if (n.kind == NetKind::Internal && n.driver == kNone) throw NetlistError("net '" + n.name + "' has no driver");
		if (n.kind == NetKind::KeyInput && !is_key_name(n.name)) throw NetlistError("bad key name '" + n.name + "'");
	}
	for (const Gate& g : gates_) {
		check_arity(g.func, g.inputs.size());
		for (NetId in : g.inputs)
			if (in >= nets_.size()) throw NetlistError("gate input references unknown net");
	}
	for (NetId o : outputs_)
		if (o >= nets_.size()) throw NetlistError("output references unknown net");
}

std::vector<bool> Netlist::key_bits(const KeyAssignment& k) const {
	auto keys = key_inputs();
	std::vector<bool> bits(keys.size());
	for (std::size_t i = 0; i < keys.size(); ++i) {
		auto it = k.find(nets_[keys[i]].name);
		if (it == k.end()) throw NetlistError("key assignment misses '" + nets_[keys[i]].name + "'");
		bits[i] = it->second;
	}
	return bits;
}

KeyAssignment Netlist::key_assignment(const std::vector<bool>& bits) const {
	auto keys = key_inputs();
	if (bits.size() != keys.size()) throw NetlistError("key width mismatch");
	KeyAssignment k;
	for (std::size_t i = 0; i < keys.size(); ++i) k[nets_[keys[i]].name] = bits[i];
	return k;
}

std::string key_to_string(const Netlist& n, const KeyAssignment& k) {
	std::string s;
	for (bool b : n.key_bits(k)) s.push_back(b ? '1' : '0');
	return s;
}

} // namespace cyclock
