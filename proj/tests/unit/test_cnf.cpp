#include "helpers.hpp"

#include "cyclock/cnf.hpp"

#include <doctest.h>

using namespace cyclock;

namespace {
bool brute(const CnfFormula& f) {
	for (std::uint64_t m = 0; m < (1ull << f.num_vars); ++m) {
		std::vector<bool> a(f.num_vars);
		for (int i = 0; i < f.num_vars; ++i) a[i] = (m >> i) & 1;
		if (model_satisfies(f, a)) return true;
	}
	return false;
}
}

TEST_CASE("gate clause counts") {
	CnfFormula f;
	int a = f.new_var(), b = f.new_var(), y = f.new_var();
	encode_gate(f, GateFunc::And, y, {a, b});
	CHECK(f.clauses.size() == 3);
	CnfFormula g;
	a = g.new_var();
	y = g.new_var();
	encode_gate(g, GateFunc::Not, y, {a});
	CHECK(g.clauses.size() == 2);
}

TEST_CASE("every gate encoding matches its truth table") {
	for (GateFunc fn : {GateFunc::And, GateFunc::Nand, GateFunc::Or, GateFunc::Nor, GateFunc::Xor, GateFunc::Xnor,
	                    GateFunc::Mux, GateFunc::Not, GateFunc::Buf}) {
		std::size_t k = (fn == GateFunc::Not || fn == GateFunc::Buf) ? 1 : 3;
		for (auto& x : th::all_inputs(k)) {
			CnfFormula f;
			std::vector<int> ins;
			for (std::size_t i = 0; i < k; ++i) ins.push_back(f.new_var());
			int y = f.new_var();
			encode_gate(f, fn, y, ins);
			std::vector<Tri> t;
			for (bool b : x) t.push_back(tri(b));
			bool want = eval_tri(fn, t.data(), k) == Tri::One;
			std::vector<int> as;
			for (std::size_t i = 0; i < k; ++i) as.push_back(x[i] ? ins[i] : -ins[i]);
			as.push_back(want ? y : -y);
			CHECK(solve(f, as).status == SatStatus::Sat);
			as.back() = -as.back();
			CHECK(solve(f, as).status == SatStatus::Unsat);
		}
	}
}

TEST_CASE("tseitin bindings follow the net ids") {
	auto n = th::load("c17.bench");
	auto f = tseitin(n, "a");
	CHECK(f.bindings.size() == n.num_nets());
	for (auto& x : th::all_inputs(5)) {
		std::vector<int> as;
		auto pis = n.primary_inputs();
		for (std::size_t i = 0; i < 5; ++i) {
			int v = f.bindings.at({"a", pis[i]});
			as.push_back(x[i] ? v : -v);
		}
		auto r = solve(f, as);
		REQUIRE(r.status == SatStatus::Sat);
		auto y = evaluate(n, x);
		for (std::size_t o = 0; o < y.size(); ++o) CHECK(r.value(f.bindings.at({"a", n.outputs()[o]})) == y[o]);
	}
}

TEST_CASE("miter of an unkeyed circuit is UNSAT, XOR-keyed is SAT") {
	auto n = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(keyinput0)\ny = NAND(a, b)\nOUTPUT(y)\n");
	CHECK(solve(build_miter(n).cnf).status == SatStatus::Unsat);
	CHECK_THROWS(build_miter(th::load("c17.bench")));
	auto k = parse_bench("INPUT(a)\nINPUT(keyinput0)\ny = XOR(a, keyinput0)\nOUTPUT(y)\n");
	auto m = build_miter(k);
	auto r = solve(m.cnf);
	REQUIRE(r.status == SatStatus::Sat);
	CHECK(r.value(m.k1[0]) != r.value(m.k2[0]));
}

TEST_CASE("solver basics") {
	CnfFormula f;
	int a = f.new_var(), b = f.new_var();
	f.add({a, b});
	f.add({-a});
	auto r = solve(f);
	REQUIRE(r.status == SatStatus::Sat);
	CHECK(r.value(b));
	CHECK(solve(f, {-b}).status == SatStatus::Unsat);
	f.add({-b});
	CHECK(solve(f).status == SatStatus::Unsat);
}

TEST_CASE("random 3-CNF against brute force") {
	std::mt19937_64 rng(11);
	for (int t = 0; t < 200; ++t) {
		CnfFormula f;
		int nv = 6 + rng() % 6;
		for (int i = 0; i < nv; ++i) f.new_var();
		int nc = static_cast<int>(nv * (3.5 + (rng() % 20) / 10.0));
		for (int c = 0; c < nc; ++c) {
			std::vector<int> cl;
			for (int j = 0; j < 3; ++j) {
				int v = 1 + rng() % nv;
				cl.push_back(rng() % 2 ? v : -v);
			}
			f.add(cl);
		}
		auto r = solve(f);
		CHECK((r.status == SatStatus::Sat) == brute(f));
		if (r.status == SatStatus::Sat) CHECK(model_satisfies(f, r.model));
	}
}

TEST_CASE("dimacs parse and export") {
	auto f = parse_dimacs("p cnf 1 1\n1 0\n");
	CHECK(f.num_vars == 1);
	CHECK(f.clauses.size() == 1);
	auto r = solve(f);
	REQUIRE(r.status == SatStatus::Sat);
	CHECK(r.value(1));
	auto g = parse_dimacs("c hi\np cnf 3 2\n1 -2\n0 3 2 0\n");
	CHECK(g.clauses.size() == 2);
	auto h = parse_dimacs(export_dimacs(g));
	CHECK(h.clauses == g.clauses);
	CHECK(h.num_vars == 3);
}

TEST_CASE("solver output import") {
	auto r = import_model("s SATISFIABLE\nv 1 -2 3 0\n", 3);
	REQUIRE(r.status == SatStatus::Sat);
	CHECK(r.value(1));
	CHECK_FALSE(r.value(2));
	CHECK(import_model("s UNSATISFIABLE\n", 3).status == SatStatus::Unsat);
	CHECK(import_model("SAT\n-1 2 0\n", 2).status == SatStatus::Sat);
}
