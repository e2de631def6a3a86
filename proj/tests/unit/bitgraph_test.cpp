/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "support/corpus.hpp"
#include "support/reference_sim.hpp"

#include "qflow/bitgraph.hpp"
#include "qflow/oracle.hpp"

#include <doctest.h>

#include <random>

using namespace qflow;
using qflow::testing::corpus_unit;
using qflow::testing::elaborate_unit;
using qflow::testing::inline_unit;
using qflow::testing::ReferenceSimulator;

namespace {

/// Compares every root against the reference simulator, exhaustively up to 16 free bits, sampled above.
void check_equivalent(const frontend::ElaboratedDesign &design, const BitBlastOptions &options = {})
{
	Forest forest = bit_blast(design, options);
	ReferenceSimulator sim(design);
	std::vector<BitRef> free = sim.input_bits();
	free.insert(free.end(), sim.registers().begin(), sim.registers().end());
	REQUIRE(free.size() < 64);

	const bool exhaustive = free.size() <= 16;
	const std::uint64_t runs = exhaustive ? (1ull << free.size()) : 4096;
	std::mt19937_64 rng(7);
	for (std::uint64_t r = 0; r < runs; ++r) {
		std::uint64_t pattern = exhaustive ? r : rng();
		std::map<BitRef, bool> pinned;
		for (std::size_t i = 0; i < free.size(); ++i)
			pinned[free[i]] = (pattern >> i) & 1;
		auto settled = sim.settle(pinned);
		auto next = sim.next_state(settled);
		auto leaf = [&](const BitRef &b) { return pinned.at(b); };
		for (const Root &root : forest.roots) {
			bool expected = root.is_register ? next.at(root.bit) : settled[root.bit.net][root.bit.bit];
			if (forest.eval(root.node, leaf) != expected) {
				FAIL_CHECK("root " << forest.bit_name(root.bit) << " differs at pattern " << pattern);
				return;
			}
		}
	}
}

} // namespace

TEST_SUITE("bitgraph")
{

TEST_CASE("example bind trees")
{
	auto design = elaborate_unit(corpus_unit({"two_secret_example.v"}, "example"));
	Forest forest = bit_blast(design);
	CHECK(forest.dump() == "o[0] = (XOR (AND i[0] (AND i[1] low)) (NOT low))\n"
			       "o[1] = (OR (AND i[0] i[1]) 1)\n");
	CHECK(forest.high_bits.size() == 2);
	CHECK(forest.registers.empty());
}

TEST_CASE("hash-consing shares identical nodes")
{
	Forest f;
	NodeId a = f.leaf(BitRef{0, 0});
	NodeId b = f.leaf(BitRef{0, 1});
	NodeId x = f.make(Op::And, {a, b});
	CHECK(f.make(Op::And, {a, b}) == x);
	CHECK(f.leaf(BitRef{0, 0}) == a);
	CHECK(f.make(Op::Or, {a, b}) != x);
}

TEST_CASE("constant folding")
{
	Forest plain;
	NodeId one = plain.constant(true), zero = plain.constant(false);
	CHECK(plain.make(Op::And, {one, zero}) == zero);
	CHECK(plain.make(Op::Not, {zero}) == one);
	NodeId a = plain.leaf(BitRef{0, 0});
	CHECK(plain.node(plain.make(Op::And, {a, one})).op == Op::And);

	Forest folding(true);
	NodeId fa = folding.leaf(BitRef{0, 0});
	CHECK(folding.make(Op::And, {fa, folding.constant(true)}) == fa);
	CHECK(folding.make(Op::And, {fa, folding.constant(false)}) == folding.constant(false));
	CHECK(folding.make(Op::Or, {fa, folding.constant(true)}) == folding.constant(true));
}

TEST_CASE("macro semantics")
{
	auto bits = [](unsigned v, int w) {
		std::vector<bool> out(w);
		for (int k = 0; k < w; ++k)
			out[k] = (v >> k) & 1;
		return out;
	};
	for (unsigned a = 0; a < 16; ++a)
		for (unsigned b = 0; b < 16; ++b) {
			CHECK(macro_eval(MacroKind::Add, bits(a, 4), bits(b, 4)) == bool(((a + b) >> 3) & 1));
			CHECK(macro_eval(MacroKind::Sub, bits(a, 4), bits(b, 4)) == bool(((a - b) >> 3) & 1));
			CHECK(macro_eval(MacroKind::Eq, bits(a, 4), bits(b, 4)) == (a == b));
			CHECK(macro_eval(MacroKind::Ne, bits(a, 4), bits(b, 4)) == (a != b));
			CHECK(macro_eval(MacroKind::Lt, bits(a, 4), bits(b, 4)) == (a < b));
			CHECK(macro_eval(MacroKind::Le, bits(a, 4), bits(b, 4)) == (a <= b));
		}
}

TEST_CASE("wide arithmetic stays as macros")
{
	auto design = elaborate_unit(inline_unit(
		"module m(input [7:0] a, input [7:0] b, output s, output c); assign s = a < b; assign c = a == b; endmodule",
		"m"));
	Forest forest = bit_blast(design);
	for (const Root &r : forest.roots)
		CHECK(forest.node(r.node).op == Op::Macro);

	BitBlastOptions expand;
	expand.macro_threshold = 16;
	Forest gates = bit_blast(design, expand);
	for (const Root &r : gates.roots)
		CHECK(gates.node(r.node).op != Op::Macro);
}

TEST_CASE("equivalence with the reference simulator")
{
	SUBCASE("example module")
	{
		check_equivalent(elaborate_unit(corpus_unit({"two_secret_example.v"}, "example")));
	}
	SUBCASE("arithmetic and comparisons")
	{
		auto design = elaborate_unit(inline_unit(R"(
module m(input [5:0] a, input [5:0] b, output [5:0] s, output [5:0] d,
	 output lt, output le, output gt, output ge, output eq, output ne, output [6:0] wide);
	assign s = a + b;
	assign d = a - b;
	assign lt = a < b;
	assign le = a <= b;
	assign gt = a > b;
	assign ge = a >= b;
	assign eq = a == b;
	assign ne = a != b;
	assign wide = a + b;
endmodule
)",
							 "m"));
		check_equivalent(design);
		BitBlastOptions expand;
		expand.macro_threshold = 16;
		check_equivalent(design, expand);
		BitBlastOptions fold;
		fold.fold_constants = true;
		check_equivalent(design, fold);
	}
	SUBCASE("operators")
	{
		check_equivalent(elaborate_unit(inline_unit(R"(
module m(input [3:0] a, input [2:0] n, input [1:0] k, output [3:0] shl, output [3:0] shr,
	 output pick, output [6:0] red, output [3:0] neg, output [5:0] cat, output [3:0] sel);
	assign shl = a << n;
	assign shr = a >> k;
	assign pick = a[n];
	assign red = {&a, |a, ^a, ~&a, ~|a, ~^a, !a};
	assign neg = -a;
	assign cat = {k, a[3:2], {2{n[0]}}};
	assign sel = (a[0] && n[1]) ? ~a : (k || a[3]) ? a ^ 4'b0101 : 4'd9;
endmodule
)",
							    "m")));
	}
	SUBCASE("procedural code")
	{
		check_equivalent(elaborate_unit(inline_unit(R"(
module m(input [1:0] op, input [3:0] a, input [3:0] b, output reg [3:0] y, output reg z);
	reg [3:0] t;
	always @(*) begin
		t = a;
		z = 1'b0;
		case (op)
			2'd0: y = a & b;
			2'd1: begin t = t ^ b; y = t; end
			2'd2: y = a | b;
			default: begin y = 4'h0; z = 1'b1; end
		endcase
		if (b[0])
			y[3] = t[0];
	end
endmodule
)",
							    "m")));
	}
	SUBCASE("sequential logic")
	{
		check_equivalent(elaborate_unit(inline_unit(R"(
module m(input clk, input en, input [2:0] d, output [2:0] q, output reg flag);
	reg [2:0] r;
	reg [2:0] s;
	always @(posedge clk) begin
		if (en)
			r <= d;
		s = r ^ d;
		flag <= s[0] & en;
	end
	assign q = r + s;
endmodule
)",
							    "m")));
	}
	SUBCASE("substitution box")
	{
		check_equivalent(elaborate_unit(corpus_unit({"toy_spn2.v"}, "sbox4")));
	}
	SUBCASE("round function with hierarchy and generate")
	{
		check_equivalent(elaborate_unit(corpus_unit({"toy_spn2.v"}, "spn_round")));
	}
	SUBCASE("two-round network")
	{
		check_equivalent(elaborate_unit(corpus_unit({"toy_spn2.v"}, "toy_spn2")));
	}
	SUBCASE("random circuits")
	{
		for (std::uint64_t seed = 1; seed <= 60; ++seed)
			check_equivalent(elaborate_unit(inline_unit(random_circuit(seed), "rc")));
	}
}

TEST_CASE("structural errors")
{
	CHECK_THROWS_AS(bit_blast(elaborate_unit(inline_unit(R"(
module m(input a, output y);
	wire p, q;
	assign p = q ^ a;
	assign q = p;
	assign y = q;
endmodule
)",
							    "m"))),
			CombinationalLoop);
	CHECK_THROWS_AS(bit_blast(elaborate_unit(inline_unit("module m(input a, output [1:0] y); assign y[0] = a; endmodule",
							    "m"))),
			UnassignedNet);
}

TEST_CASE("register dependency components")
{
	auto design = elaborate_unit(inline_unit(R"(
module m(input clk, input d, output y);
	reg a, b, c;
	always @(posedge clk) begin
		a <= d;
		b <= c ^ a;
		c <= b;
	end
	assign y = c;
endmodule
)",
						 "m"));
	Forest forest = bit_blast(design);
	DependencyGraph deps = compute_dependencies(forest);
	auto root_of = [&](const std::string &name) {
		auto net = forest.nets.size();
		for (std::size_t n = 0; n < forest.nets.size(); ++n)
			if (forest.nets[n].name == name)
				net = n;
		return *forest.root_of(BitRef{static_cast<int>(net), 0});
	};
	std::size_t a = root_of("a"), b = root_of("b"), c = root_of("c"), y = root_of("y");
	CHECK(deps.scc_of[b] == deps.scc_of[c]);
	CHECK(deps.scc_of[a] != deps.scc_of[b]);
	CHECK(deps.cyclic[deps.scc_of[b]]);
	CHECK_FALSE(deps.cyclic[deps.scc_of[a]]);
	CHECK(deps.scc_of[a] < deps.scc_of[b]);
	CHECK(deps.scc_of[b] < deps.scc_of[y]);
	CHECK(register_leaves(forest, forest.roots[y].node).size() == 1);
}

}
