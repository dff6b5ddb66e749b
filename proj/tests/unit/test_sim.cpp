#include "helpers.hpp"

#include "cyclock/cnf.hpp"
#include "cyclock/graph.hpp"

#include <doctest.h>

using namespace cyclock;

TEST_CASE("buffer passes its input") {
	auto n = th::load("buffer3.bench");
	for (auto& x : th::all_inputs(3)) CHECK(evaluate(n, x)[0] == x[0]);
}

TEST_CASE("two-level circuit against its truth table") {
	auto n = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nt = NAND(a, b)\nu = NOR(b, c)\ny = XNOR(t, u)\nOUTPUT(y)\n");
	for (auto& x : th::all_inputs(3)) {
		bool t = !(x[0] && x[1]), u = !(x[1] || x[2]);
		CHECK(evaluate(n, x)[0] == (t == u));
	}
}

TEST_CASE("XOR loops: the pair settles, the lone loop does not") {
	auto b = th::load("xor_pair.bench");
	for (bool r : {false, true}) {
		auto res = evaluate_cyclic(b, {r});
		REQUIRE(res.status == EvalStatus::Stable);
		CHECK(res.bits()[0] == r);
	}
	auto d = th::load("xor_loop.bench");
	bool unstable = false;
	for (auto& x : th::all_inputs(2)) unstable = unstable || evaluate_cyclic(d, x).status != EvalStatus::Stable;
	CHECK(unstable);
}

TEST_CASE("cyclic evaluator agrees with the plain one on DAGs") {
	for (std::uint64_t s = 1; s <= 4; ++s) {
		auto n = th::toy(9, 70, s);
		for (auto& x : th::all_inputs(9)) {
			auto r = evaluate_cyclic(n, x);
			REQUIRE(r.status == EvalStatus::Stable);
			CHECK(r.bits() == evaluate(n, x));
		}
	}
}

TEST_CASE("plain evaluator refuses a cycle") {
	CHECK_THROWS_AS(evaluate(th::load("xor_pair.bench"), {true}), CycleError);
}

TEST_CASE("oracle checks the input width") {
	NetlistOracle o(th::load("c17.bench"));
	CHECK(o.num_inputs() == 5);
	CHECK_THROWS(o.query({true, false}));
	auto y = o.query({true, true, true, true, true});
	CHECK(y.size() == 2);
	CHECK(o.queries() == 1);
}

TEST_CASE("cross-coupled NOR latch is stable off the forbidden pattern") {
	auto n = parse_bench("INPUT(s)\nINPUT(r)\nq = NOR(r, qn)\nqn = NOR(s, q)\nOUTPUT(q)\n");
	CHECK(evaluate_cyclic(n, {true, false}).status == EvalStatus::Stable);
	CHECK(evaluate_cyclic(n, {true, false}).bits()[0] == true);
	CHECK(evaluate_cyclic(n, {false, true}).bits()[0] == false);
	CHECK(evaluate_cyclic(n, {true, true}).status == EvalStatus::Stable);
	CHECK(evaluate_cyclic(n, {false, false}).status != EvalStatus::Stable);
}

TEST_CASE("ternary fixpoint values are sound") {
	// every binary value the ternary pass commits to must hold in every binary fixpoint
	auto n = th::load("three_loops.bench");
	auto pis = n.primary_inputs();
	for (auto& kb : th::all_inputs(3)) {
		CyclicEvaluator ev(n, kb);
		for (auto& x : th::all_inputs(3)) {
			auto t = ev.ternary(x, 0);
			CnfFormula f;
			auto lit = encode_netlist(f, n);
			for (std::size_t i = 0; i < 3; ++i) f.add({x[i] ? lit[pis[i]] : -lit[pis[i]]});
			auto keys = n.key_inputs();
			for (std::size_t i = 0; i < 3; ++i) f.add({kb[i] ? lit[keys[i]] : -lit[keys[i]]});
			for (NetId v = 0; v < n.num_nets(); ++v) {
				if (t[v] == Tri::X) continue;
				CHECK(solve(f, {t[v] == Tri::One ? -lit[v] : lit[v]}).status == SatStatus::Unsat);
			}
		}
	}
}

TEST_CASE("hex encoding") {
	CHECK(to_hex({true, false, false, false, true}) == "11");
	CHECK(from_hex("11", 5) == Bits{true, false, false, false, true});
	CHECK(from_hex(to_hex({false, true, true}), 3) == Bits{false, true, true});
	CHECK_THROWS(from_hex("zz", 4));
}
