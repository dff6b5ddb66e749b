#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cyclock {

using NetId = std::uint32_t;
using GateId = std::uint32_t;
inline constexpr std::uint32_t kNone = 0xffffffffu;

enum class GateFunc : std::uint8_t { And, Nand, Or, Nor, Xor, Xnor, Not, Buf, Mux };
enum class NetKind : std::uint8_t { PrimaryInput, KeyInput, Internal };

const char* func_name(GateFunc f);
std::optional<GateFunc> func_from_name(std::string_view s);

struct Net {
	std::string name;
	NetKind kind = NetKind::Internal;
	GateId driver = kNone;
};

/// For Mux the inputs are (select, a, b); select=0 picks a.
struct Gate {
	GateFunc func;
	std::vector<NetId> inputs;
	NetId output;
};

/// Key assignment by key-input name.
using KeyAssignment = std::map<std::string, bool>;

class NetlistError : public std::runtime_error {
public:
	explicit NetlistError(const std::string& msg, int line = 0)
	    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
	int line() const { return line_; }

private:
	int line_;
};

bool is_key_name(std::string_view name);

class Netlist {
public:
	// construction
	NetId add_input(const std::string& name);
	NetId add_net(const std::string& name);
	NetId get_or_add_net(const std::string& name);
	GateId add_gate(GateFunc f, std::vector<NetId> inputs, NetId output);
	/// Creates a fresh output net named after `hint` and its driving gate.
	NetId add_gate_net(GateFunc f, std::vector<NetId> inputs, const std::string& hint);
	void add_output(NetId net);

	// mutation used by transforms
	void set_gate_input(GateId g, std::size_t pin, NetId net) { gates_[g].inputs[pin] = net; }
	void set_output(std::size_t idx, NetId net) { outputs_[idx] = net; }
	void rename_net(NetId id, const std::string& name);
	/// Moves every consumer (gate pins and POs) of `from` onto `to`, except gates in `keep`.
	void redirect_consumers(NetId from, NetId to, const std::vector<GateId>& keep = {});
	std::string fresh_name(const std::string& base) const;
	std::string next_key_name() const;

	// queries
	std::size_t num_nets() const { return nets_.size(); }
	std::size_t num_gates() const { return gates_.size(); }
	const Net& net(NetId id) const { return nets_[id]; }
	const Gate& gate(GateId id) const { return gates_[id]; }
	const std::vector<Net>& nets() const { return nets_; }
	const std::vector<Gate>& gates() const { return gates_; }
	/// All declared inputs in declaration order (primary and key).
	const std::vector<NetId>& inputs() const { return inputs_; }
	std::vector<NetId> primary_inputs() const;
	std::vector<NetId> key_inputs() const;
	const std::vector<NetId>& outputs() const { return outputs_; }
	std::optional<NetId> find(const std::string& name) const;
	NetId at(const std::string& name) const;
	GateId driver(NetId id) const { return nets_[id].driver; }
	bool is_input(NetId id) const { return nets_[id].kind != NetKind::Internal; }
	bool is_key(NetId id) const { return nets_[id].kind == NetKind::KeyInput; }
	/// Mux whose select is a key input.
	bool is_key_mux(GateId g) const;

	// "used" marks (path selection)
	bool marked(GateId g) const { return g < marks_.size() && marks_[g]; }
	void mark(GateId g);

	/// Consumer gates of each net, ascending and deduplicated.
	std::vector<std::vector<GateId>> fanouts() const;
	/// Gate graph: succ[g] = gates consuming out(g), ascending.
	std::vector<std::vector<GateId>> successors() const;
	std::vector<std::vector<GateId>> predecessors() const;

	/// Throws NetlistError when a structural invariant is broken.
	void validate() const;

	std::vector<bool> key_bits(const KeyAssignment& k) const;
	KeyAssignment key_assignment(const std::vector<bool>& bits) const;

private:
	std::vector<Net> nets_;
	std::vector<Gate> gates_;
	std::vector<NetId> inputs_;
	std::vector<NetId> outputs_;
	std::unordered_map<std::string, NetId> by_name_;
	std::vector<char> marks_;
};

std::string key_to_string(const Netlist& n, const KeyAssignment& k);

} // namespace cyclock
