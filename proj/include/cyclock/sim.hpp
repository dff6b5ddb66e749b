#pragma once

#include "cyclock/netlist.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace cyclock {

enum class Tri : std::uint8_t { Zero = 0, One = 1, X = 2 };

inline Tri tri(bool b) { return b ? Tri::One : Tri::Zero; }
char tri_char(Tri t);
Tri eval_tri(GateFunc f, const Tri* in, std::size_t n);

using Bits = std::vector<bool>;

enum class EvalStatus { Stable, Oscillating, Indeterminate };
const char* to_string(EvalStatus s);

struct CyclicEvalResult {
	EvalStatus status = EvalStatus::Stable;
	std::vector<Tri> outputs;
	std::size_t iterations = 0;
	Bits bits() const;
};

class CycleError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Topological evaluator for a netlist that is acyclic once key muxes are resolved.
class Evaluator {
public:
	/// `key` in key_inputs() order; throws CycleError when the keyed graph is cyclic.
	Evaluator(const Netlist& n, const Bits& key);
	Bits run(const Bits& inputs) const;

private:
	const Netlist& n_;
	Bits key_;
	std::vector<GateId> order_;
	std::vector<NetId> pis_, keys_;
};

/// Ternary fixpoint evaluation; residual X on outputs is resolved by counting binary fixpoints.
class CyclicEvaluator {
public:
	CyclicEvaluator(const Netlist& n, const Bits& key);
	CyclicEvalResult run(const Bits& inputs, std::size_t max_iters = 0) const;
	/// Ternary fixpoint of every net (no residual resolution).
	std::vector<Tri> ternary(const Bits& inputs, std::size_t max_iters, std::size_t* iters = nullptr) const;

private:
	const Netlist& n_;
	Bits key_;
	std::vector<GateId> order_;
	std::vector<NetId> pis_, keys_;
};

Bits evaluate(const Netlist& n, const Bits& inputs, const KeyAssignment& key = {});
CyclicEvalResult evaluate_cyclic(const Netlist& n, const Bits& inputs, const KeyAssignment& key = {},
                                 std::size_t max_iters = 0);

/// Black-box oracle: primary-input bits in, primary-output bits out.
class Oracle {
public:
	virtual ~Oracle() = default;
	virtual Bits query(const Bits& inputs) = 0;
	virtual std::size_t num_inputs() const = 0;
	virtual std::size_t num_outputs() const = 0;
	std::size_t queries() const { return queries_; }

protected:
	std::size_t queries_ = 0;
};

class NetlistOracle : public Oracle {
public:
	explicit NetlistOracle(const Netlist& original);
	Bits query(const Bits& inputs) override;
	std::size_t num_inputs() const override { return n_.primary_inputs().size(); }
	std::size_t num_outputs() const override { return n_.outputs().size(); }

private:
	Netlist n_;
	bool cyclic_;
	std::unique_ptr<Evaluator> ev_;
	std::unique_ptr<CyclicEvaluator> cev_;
};

/// Talks the `Q <hex>` / `A <hex>` line protocol with a child process.
class ExternalOracle : public Oracle {
public:
	ExternalOracle(const std::string& command, std::size_t num_inputs, std::size_t num_outputs);
	~ExternalOracle() override;
	Bits query(const Bits& inputs) override;
	std::size_t num_inputs() const override { return ni_; }
	std::size_t num_outputs() const override { return no_; }

private:
	std::size_t ni_, no_;
	int to_child_ = -1, from_child_ = -1;
	int pid_ = -1;
	std::string buf_;
};

/// Bit i has weight 2^i; most significant hex digit first.
std::string to_hex(const Bits& b);
Bits from_hex(const std::string& s, std::size_t width);

} // namespace cyclock
