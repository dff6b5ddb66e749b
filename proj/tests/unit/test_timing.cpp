#include "helpers.hpp"

#include "cyclock/timing.hpp"

#include <doctest.h>

#include <functional>

using namespace cyclock;

TEST_CASE("inverter chain") {
	auto n = parse_bench("INPUT(a)\nb = NOT(a)\nc = NOT(b)\nd = NOT(c)\nOUTPUT(d)\n");
	auto t = sta(n, DelayModel{});
	CHECK(t.critical == doctest::Approx(3));
	CHECK(t.arrival[n.at("c")] == doctest::Approx(2));
	CHECK(t.slack[n.at("b")] == doctest::Approx(0));
}

TEST_CASE("diamond slack") {
	auto n = parse_bench("INPUT(a)\nx = NOT(a)\np = NOT(a)\nq = NOT(p)\ny = NOT(q)\nz = AND(x, y)\nOUTPUT(z)\n");
	auto t = sta(n, DelayModel{});
	CHECK(t.critical == doctest::Approx(4));
	CHECK(t.slack[n.at("x")] == doctest::Approx(2));
	CHECK(t.slack[n.at("y")] == doctest::Approx(0));
	auto late = sta(n, DelayModel{}, 6.0);
	CHECK(late.slack[n.at("y")] == doctest::Approx(2));
}

TEST_CASE("delay model from JSON") {
	auto d = DelayModel::from_json(R"({"unit": 2, "mux": 3, "gates": {"NOT": 0.5}})");
	CHECK(d.of(GateFunc::Not) == doctest::Approx(0.5));
	CHECK(d.of(GateFunc::And) == doctest::Approx(2));
	CHECK(d.of(GateFunc::Mux) == doctest::Approx(3));
	auto back = DelayModel::from_json(d.to_json());
	CHECK(back.of(GateFunc::Not) == doctest::Approx(0.5));
}

TEST_CASE("critical delay equals the longest path found by enumeration") {
	for (std::uint64_t s = 1; s <= 8; ++s) {
		auto n = th::toy(6, 40, s);
		std::function<double(NetId)> longest = [&](NetId x) -> double {
			GateId g = n.driver(x);
			if (g == kNone) return 0;
			double m = 0;
			for (NetId in : n.gate(g).inputs) m = std::max(m, longest(in));
			return m + 1;
		};
		double want = 0;
		for (NetId o : n.outputs()) want = std::max(want, longest(o));
		auto t = sta(n, DelayModel{});
		CHECK(t.critical == doctest::Approx(want));
		for (NetId x = 0; x < n.num_nets(); ++x) {
			CHECK(t.slack[x] >= -1e-9);
			CHECK(t.arrival[x] <= t.required[x] + 1e-9);
		}
	}
}

TEST_CASE("zero budget on an all-critical chain inserts nothing") {
	std::string b = "INPUT(a)\ng0 = NOT(a)\n";
	for (int i = 1; i < 20; ++i) b += "g" + std::to_string(i) + " = NOT(g" + std::to_string(i - 1) + ")\n";
	b += "OUTPUT(g19)\n";
	auto n = parse_bench(b);
	ObfuscationConfig c;
	c.slack_budget_percent = 0;
	c.n = 2;
	auto L = timing_aware_obfuscate(n, c, DelayModel{});
	CHECK(L.report.muxes == 0);
	CHECK(L.netlist.num_gates() == n.num_gates());
}

TEST_CASE("timing-aware insertion stays inside the budget") {
	for (double budget : {0.0, 5.0}) {
		for (std::uint64_t s = 1; s <= 4; ++s) {
			auto orig = th::toy(10, 200, s);
			ObfuscationConfig c;
			c.n = 4;
			c.seed = s;
			c.slack_budget_percent = budget;
			auto L = timing_aware_obfuscate(orig, c, DelayModel{});
			double d0 = sta(orig, DelayModel{}).critical;
			double d1 = sta(L.netlist, DelayModel{}, std::nullopt, L.report.key).critical;
			CHECK(d1 <= d0 * (1 + budget / 100) + 1e-9);
			CHECK(verify_key(orig, L.netlist, L.report.key).equivalent);
		}
	}
}
