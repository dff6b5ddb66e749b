#include "helpers.hpp"

#include "cyclock/graph.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace cyclock;

TEST_CASE("bench parse of c17") {
	auto n = th::load("c17.bench");
	CHECK(n.primary_inputs().size() == 5);
	CHECK(n.outputs().size() == 2);
	CHECK(n.num_gates() == 6);
	CHECK(is_acyclic(n));
	n.validate();
}

TEST_CASE("bench parse errors carry a line") {
	CHECK_THROWS_AS(parse_bench("INPUT(a)\nb = AND(a)\nOUTPUT(b)\n"), NetlistError);
	CHECK_THROWS_AS(parse_bench("INPUT(a)\nb = FOO(a)\nOUTPUT(b)\n"), NetlistError);
	CHECK_THROWS_AS(parse_bench("INPUT(a)\nb = NOT(a)\nb = NOT(a)\nOUTPUT(b)\n"), NetlistError);
	CHECK_THROWS_AS(parse_bench("INPUT(a)\nb = NOT(zz)\nOUTPUT(b)\n"), NetlistError);
	try {
		parse_bench("INPUT(a)\n\nb = AND(a)\n");
		FAIL("no throw");
	} catch (const NetlistError& e) {
		CHECK(e.line() == 3);
	}
}

TEST_CASE("key inputs are recognised by name") {
	auto n = th::load("xor_pair_keyed.bench");
	CHECK(n.key_inputs().size() == 2);
	CHECK(n.primary_inputs().size() == 3);
	CHECK(n.is_key_mux(n.driver(n.at("m0"))));
	CHECK_FALSE(n.is_key_mux(n.driver(n.at("X1"))));
}

TEST_CASE("serialize round trip keeps the function") {
	for (std::uint64_t s = 1; s <= 5; ++s) {
		auto n = th::toy(8, 60, s);
		auto back = parse_bench(serialize_bench(n));
		CHECK(back.num_gates() == n.num_gates());
		CHECK(th::same_function(n, back));
	}
	auto f = th::load("three_loops.bench");
	auto g = parse_bench(serialize_bench(f));
	CHECK(serialize_bench(g) == serialize_bench(f));
}

TEST_CASE("mux decomposition") {
	auto n = parse_bench("INPUT(s)\nINPUT(a)\nINPUT(b)\ny = MUX(s, a, b)\nOUTPUT(y)\n");
	auto d = parse_bench(serialize_bench(n, true));
	CHECK(d.num_gates() == 4);
	CHECK(th::same_function(n, d));
	for (auto& x : th::all_inputs(3)) CHECK(evaluate(n, x)[0] == (x[0] ? x[2] : x[1]));
}

TEST_CASE("fanin cone matches a plain backward search") {
	auto n = th::toy(10, 80, 3);
	auto preds = n.predecessors();
	for (NetId o : n.outputs()) {
		std::set<GateId> seen;
		std::vector<GateId> st;
		if (n.driver(o) != kNone) st.push_back(n.driver(o));
		while (!st.empty()) {
			GateId g = st.back();
			st.pop_back();
			if (!seen.insert(g).second) continue;
			for (GateId p : preds[g]) st.push_back(p);
		}
		auto cone = fanin_cone(n, o);
		CHECK(std::vector<GateId>(seen.begin(), seen.end()) == cone);
	}
}

TEST_CASE("feedback set of the three cycle fixture") {
	auto n = th::load("three_loops.bench");
	auto fb = find_feedback_set(n);
	CHECK(fb.size() == 2);
	std::set<std::string> heads;
	for (auto& e : fb) heads.insert(n.net(n.gate(e.from).output).name);
	CHECK(heads.count("E"));
	CHECK(heads.count("m1"));
	std::set<Edge> cut(fb.begin(), fb.end());
	CHECK(topo_order(n, cut).has_value());
	CHECK_FALSE(topo_order(n).has_value());
}

TEST_CASE("cutting the feedback set of random cyclic graphs leaves a DAG") {
	std::mt19937_64 rng(7);
	for (int t = 0; t < 20; ++t) {
		Netlist n;
		std::vector<NetId> nets;
		for (int i = 0; i < 4; ++i) nets.push_back(n.add_input("i" + std::to_string(i)));
		std::vector<NetId> outs;
		for (int g = 0; g < 15; ++g) outs.push_back(n.add_net("g" + std::to_string(g)));
		for (int g = 0; g < 15; ++g) {
			std::vector<NetId> pool = nets;
			pool.insert(pool.end(), outs.begin(), outs.end());
			NetId a = pool[rng() % pool.size()], b = pool[rng() % pool.size()];
			n.add_gate(GateFunc::Nand, {a, b}, outs[g]);
		}
		n.add_output(outs.back());
		auto fb = find_feedback_set(n);
		std::set<Edge> cut(fb.begin(), fb.end());
		CHECK(topo_order(n, cut).has_value());
		CHECK(is_acyclic(n) == fb.empty());
	}
}

TEST_CASE("strongly connected components") {
	CHECK(scc(th::load("c17.bench")).empty());
	auto c = scc(th::load("xor_pair_keyed.bench"));
	REQUIRE(c.size() == 1);
	CHECK(c[0].size() == 4);
	auto s = scc(th::load("xor_pair.bench"));
	CHECK(s.size() == 1); // self loop on X2 sits inside the X1/X2 component
}

TEST_CASE("insert_mux keeps the function under the correct bit") {
	auto n = th::toy(8, 60, 2);
	auto orig = n;
	NetId victim = n.gate(10).output, alt = n.gate(3).output;
	insert_mux(n, victim, alt, n.next_key_name(), true);
	n.validate();
	REQUIRE(n.key_inputs().size() == 1);
	CHECK(th::same_function(orig, n, n.key_assignment({true})));
}

TEST_CASE("insert_mux can close a cycle") {
	auto n = th::toy(8, 60, 2);
	auto cone = fanin_cone(n, n.outputs()[0]);
	REQUIRE(cone.size() > 4);
	GateId hi = cone.back(), lo = cone.front();
	insert_mux(n, n.gate(lo).output, n.gate(hi).output, n.next_key_name(), false);
	CHECK_FALSE(is_acyclic(n));
}

TEST_CASE("duplicate names are rejected") {
	Netlist n;
	n.add_input("keyinput0");
	CHECK_THROWS_AS(n.add_input("keyinput0"), NetlistError);
	CHECK_THROWS_AS(n.add_net("keyinput0"), NetlistError);
	NetId a = n.add_input("a");
	NetId y = n.add_net("y");
	n.add_gate(GateFunc::Not, {a}, y);
	CHECK_THROWS_AS(n.add_gate(GateFunc::Buf, {a}, y), NetlistError);
}

TEST_CASE("key assignment helpers") {
	auto n = th::load("three_loops.bench");
	auto k = n.key_assignment({false, false, true});
	CHECK(n.key_bits(k) == std::vector<bool>{false, false, true});
	CHECK_THROWS_AS(n.key_assignment({true}), NetlistError);
	CHECK_THROWS_AS(n.key_bits({{"keyinput1", true}}), NetlistError);
}
