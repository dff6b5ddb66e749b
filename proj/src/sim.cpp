#include "cyclock/sim.hpp"

#include "cyclock/cnf.hpp"
#include "cyclock/graph.hpp"
#include "cyclock/solver.hpp"

#include <algorithm>
#include <csignal>
#include <cstring>
#include <stdexcept>
#include <sys/wait.h>
#include <unistd.h>

namespace cyclock {

char tri_char(Tri t) { return t == Tri::Zero ? '0' : t == Tri::One ? '1' : 'X'; }

const char* to_string(EvalStatus s) {
	switch (s) {
	case EvalStatus::Stable: return "stable";
	case EvalStatus::Oscillating: return "oscillating";
	case EvalStatus::Indeterminate: return "indeterminate";
	}
	return "?";
}

Tri eval_tri(GateFunc f, const Tri* in, std::size_t n) {
	switch (f) {
	case GateFunc::Buf: return in[0];
	case GateFunc::Not: return in[0] == Tri::X ? Tri::X : tri(in[0] == Tri::Zero);
	case GateFunc::And:
	case GateFunc::Nand: {
		bool x = false;
		for (std::size_t i = 0; i < n; ++i) {
			if (in[i] == Tri::Zero) return tri(f == GateFunc::Nand);
			if (in[i] == Tri::X) x = true;
		}
		return x ? Tri::X : tri(f == GateFunc::And);
	}
	case GateFunc::Or:
	case GateFunc::Nor: {
		bool x = false;
		for (std::size_t i = 0; i < n; ++i) {
			if (in[i] == Tri::One) return tri(f == GateFunc::Or);
			if (in[i] == Tri::X) x = true;
		}
		return x ? Tri::X : tri(f == GateFunc::Nor);
	}
	case GateFunc::Xor:
	case GateFunc::Xnor: {
		bool p = f == GateFunc::Xnor;
		for (std::size_t i = 0; i < n; ++i) {
			if (in[i] == Tri::X) return Tri::X;
			p ^= in[i] == Tri::One;
		}
		return tri(p);
	}
	case GateFunc::Mux:
		if (in[0] == Tri::Zero) return in[1];
		if (in[0] == Tri::One) return in[2];
		return in[1] == in[2] ? in[1] : Tri::X;
	}
	return Tri::X;
}

Bits CyclicEvalResult::bits() const {
	Bits b;
	for (Tri t : outputs) b.push_back(t == Tri::One);
	return b;
}

static void check_width(const char* what, std::size_t got, std::size_t want) {
	if (got != want)
		throw std::invalid_argument(std::string(what) + " width " + std::to_string(got) + ", expected " + std::to_string(want));
}

Evaluator::Evaluator(const Netlist& n, const Bits& key) : n_(n), key_(key), pis_(n.primary_inputs()), keys_(n.key_inputs()) {
	check_width("key", key.size(), keys_.size());
	std::vector<int> key_index(n.num_nets(), -1);
	for (std::size_t i = 0; i < keys_.size(); ++i) key_index[keys_[i]] = static_cast<int>(i);
	std::size_t G = n.num_gates();
	std::vector<std::vector<GateId>> succ(G);
	std::vector<std::uint32_t> indeg(G, 0);
	for (GateId g = 0; g < G; ++g) {
		const Gate& gt = n.gate(g);
		std::vector<NetId> active = gt.inputs;
		if (gt.func == GateFunc::Mux && key_index[gt.inputs[0]] >= 0)
			active = {gt.inputs[0], key[static_cast<std::size_t>(key_index[gt.inputs[0]])] ? gt.inputs[2] : gt.inputs[1]};
		std::sort(active.begin(), active.end());
		active.erase(std::unique(active.begin(), active.end()), active.end());
		for (NetId in : active) {
			GateId d = n.driver(in);
			if (d == kNone) continue;
			succ[d].push_back(g);
			++indeg[g];
		}
	}
	std::vector<GateId> ready;
	for (GateId g = 0; g < G; ++g)
		if (!indeg[g]) ready.push_back(g);
	while (!ready.empty()) {
		GateId g = ready.back();
		ready.pop_back();
		order_.push_back(g);
		for (GateId s : succ[g])
			if (--indeg[s] == 0) ready.push_back(s);
	}
	if (order_.size() != G) throw CycleError("netlist is cyclic under the given key");
}

Bits Evaluator::run(const Bits& inputs) const {
	check_width("input", inputs.size(), pis_.size());
	std::vector<std::uint8_t> v(n_.num_nets(), 0);
	for (std::size_t i = 0; i < pis_.size(); ++i) v[pis_[i]] = inputs[i];
	for (std::size_t i = 0; i < keys_.size(); ++i) v[keys_[i]] = key_[i];
	Tri buf[64];
	std::vector<Tri> big;
	for (GateId g : order_) {
		const Gate& gt = n_.gate(g);
		Tri* in = buf;
		if (gt.inputs.size() > 64) {
			big.resize(gt.inputs.size());
			in = big.data();
		}
		for (std::size_t i = 0; i < gt.inputs.size(); ++i) in[i] = static_cast<Tri>(v[gt.inputs[i]] & 1);
		v[gt.output] = static_cast<std::uint8_t>(eval_tri(gt.func, in, gt.inputs.size()));
	}
	Bits out;
	out.reserve(n_.outputs().size());
	for (NetId o : n_.outputs()) out.push_back(v[o] == 1);
	return out;
}

CyclicEvaluator::CyclicEvaluator(const Netlist& n, const Bits& key)
    : n_(n), key_(key), pis_(n.primary_inputs()), keys_(n.key_inputs()) {
	check_width("key", key.size(), keys_.size());
	auto fb = find_feedback_set(n);
	auto order = topo_order(n, std::set<Edge>(fb.begin(), fb.end()));
	order_ = order ? *order : std::vector<GateId>{};
}

std::vector<Tri> CyclicEvaluator::ternary(const Bits& inputs, std::size_t max_iters, std::size_t* iters) const {
	check_width("input", inputs.size(), pis_.size());
	std::vector<Tri> v(n_.num_nets(), Tri::X);
	for (std::size_t i = 0; i < pis_.size(); ++i) v[pis_[i]] = tri(inputs[i]);
	for (std::size_t i = 0; i < keys_.size(); ++i) v[keys_[i]] = tri(key_[i]);
	if (max_iters == 0) max_iters = 2 * n_.num_nets() + 2;
	std::vector<Tri> in;
	std::size_t it = 0;
	bool changed = true;
	while (changed && it < max_iters) {
		changed = false;
		++it;
		for (GateId g : order_) {
			const Gate& gt = n_.gate(g);
			in.resize(gt.inputs.size());
			for (std::size_t i = 0; i < gt.inputs.size(); ++i) in[i] = v[gt.inputs[i]];
			Tri r = eval_tri(gt.func, in.data(), in.size());
			if (r != v[gt.output]) {
				v[gt.output] = r;
				changed = true;
			}
		}
	}
	if (iters) *iters = it;
	return v;
}

CyclicEvalResult CyclicEvaluator::run(const Bits& inputs, std::size_t max_iters) const {
	CyclicEvalResult res;
	auto v = ternary(inputs, max_iters, &res.iterations);
	bool any_x = false;
	for (NetId o : n_.outputs()) {
		res.outputs.push_back(v[o]);
		any_x |= v[o] == Tri::X;
	}
	if (!any_x) return res;

	// Residual: count binary fixpoints of the nets the ternary pass left at X.
	Solver s;
	SolverSink sink(s);
	std::vector<int> lit(n_.num_nets(), 0);
	int t = sink.true_lit();
	for (NetId i = 0; i < n_.num_nets(); ++i)
		lit[i] = v[i] == Tri::X ? sink.new_var() : (v[i] == Tri::One ? t : -t);
	std::vector<int> ins;
	for (const Gate& g : n_.gates()) {
		if (v[g.output] != Tri::X) continue;
		ins.clear();
		for (NetId in : g.inputs) ins.push_back(lit[in]);
		encode_gate(sink, g.func, lit[g.output], ins);
	}
	if (s.solve() != SatStatus::Sat) {
		res.status = EvalStatus::Oscillating;
		return res;
	}
	std::vector<int> block;
	std::vector<Tri> first = res.outputs;
	for (std::size_t i = 0; i < n_.outputs().size(); ++i) {
		NetId o = n_.outputs()[i];
		if (v[o] != Tri::X) continue;
		bool b = s.lit_value(lit[o]);
		first[i] = tri(b);
		block.push_back(b ? -lit[o] : lit[o]);
	}
	s.add_clause(block);
	if (s.solve() == SatStatus::Sat) {
		res.status = EvalStatus::Indeterminate;
		return res;
	}
	res.outputs = first;
	return res;
}

Bits evaluate(const Netlist& n, const Bits& inputs, const KeyAssignment& key) {
	return Evaluator(n, n.key_inputs().empty() ? Bits{} : n.key_bits(key)).run(inputs);
}

CyclicEvalResult evaluate_cyclic(const Netlist& n, const Bits& inputs, const KeyAssignment& key, std::size_t max_iters) {
	return CyclicEvaluator(n, n.key_inputs().empty() ? Bits{} : n.key_bits(key)).run(inputs, max_iters);
}

NetlistOracle::NetlistOracle(const Netlist& original) : n_(original) {
	if (!n_.key_inputs().empty()) throw std::invalid_argument("oracle netlist must not have key inputs");
	cyclic_ = !is_acyclic(n_);
	if (cyclic_) cev_ = std::make_unique<CyclicEvaluator>(n_, Bits{});
	else ev_ = std::make_unique<Evaluator>(n_, Bits{});
}

Bits NetlistOracle::query(const Bits& inputs) {
	check_width("query", inputs.size(), num_inputs());
	++queries_;
	if (!cyclic_) return ev_->run(inputs);
	auto r = cev_->run(inputs);
	if (r.status != EvalStatus::Stable)
		throw std::runtime_error(std::string("oracle is not combinational on query ") + to_hex(inputs) + " (" +
		                         to_string(r.status) + ")");
	return r.bits();
}

std::string to_hex(const Bits& b) {
	static const char* digits = "0123456789abcdef";
	std::size_t nd = std::max<std::size_t>(1, (b.size() + 3) / 4);
	std::string s(nd, '0');
	for (std::size_t d = 0; d < nd; ++d) {
		unsigned v = 0;
		for (std::size_t k = 0; k < 4; ++k) {
			std::size_t i = d * 4 + k;
			if (i < b.size() && b[i]) v |= 1u << k;
		}
		s[nd - 1 - d] = digits[v];
	}
	return s;
}

Bits from_hex(const std::string& s, std::size_t width) {
	Bits b(width, false);
	std::size_t nd = s.size();
	for (std::size_t d = 0; d < nd; ++d) {
		char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[nd - 1 - d])));
		unsigned v;
		if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
		else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a' + 10);
		else throw std::invalid_argument("bad hex digit");
		for (std::size_t k = 0; k < 4; ++k) {
			std::size_t i = d * 4 + k;
			if (v & (1u << k)) {
				if (i >= width) throw std::invalid_argument("hex value wider than " + std::to_string(width) + " bits");
				b[i] = true;
			}
		}
	}
	return b;
}

ExternalOracle::ExternalOracle(const std::string& command, std::size_t ni, std::size_t no) : ni_(ni), no_(no) {
	int down[2], up[2];
	if (pipe(down) != 0 || pipe(up) != 0) throw std::runtime_error("pipe failed");
	pid_t pid = fork();
	if (pid < 0) throw std::runtime_error("fork failed");
	if (pid == 0) {
		dup2(down[0], 0);
		dup2(up[1], 1);
		close(down[0]);
		close(down[1]);
		close(up[0]);
		close(up[1]);
		execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
		_exit(127);
	}
	close(down[0]);
	close(up[1]);
	to_child_ = down[1];
	from_child_ = up[0];
	pid_ = pid;
	std::signal(SIGPIPE, SIG_IGN);
}

ExternalOracle::~ExternalOracle() {
	if (to_child_ >= 0) close(to_child_);
	if (from_child_ >= 0) close(from_child_);
	if (pid_ > 0) {
		int st;
		waitpid(pid_, &st, 0);
	}
}

Bits ExternalOracle::query(const Bits& inputs) {
	check_width("query", inputs.size(), ni_);
	++queries_;
	std::string q = "Q " + to_hex(inputs) + "\n";
	if (write(to_child_, q.data(), q.size()) != static_cast<ssize_t>(q.size())) throw std::runtime_error("oracle process closed");
	for (;;) {
		auto nl = buf_.find('\n');
		if (nl != std::string::npos) {
			std::string line = buf_.substr(0, nl);
			buf_.erase(0, nl + 1);
			if (!line.empty() && line.back() == '\r') line.pop_back();
			if (line.rfind("A ", 0) != 0) throw std::runtime_error("oracle protocol error: '" + line + "'");
			return from_hex(line.substr(2), no_);
		}
		char tmp[512];
		ssize_t got = read(from_child_, tmp, sizeof tmp);
		if (got <= 0) throw std::runtime_error("oracle process closed");
		buf_.append(tmp, static_cast<std::size_t>(got));
	}
}

} // namespace cyclock
