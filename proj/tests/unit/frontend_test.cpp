/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "support/corpus.hpp"

#include "qflow/frontend/labels.hpp"
#include "qflow/frontend/parser.hpp"

#include <doctest.h>

using namespace qflow;
using namespace qflow::frontend;
using qflow::testing::corpus_unit;
using qflow::testing::elaborate_unit;
using qflow::testing::inline_unit;

TEST_SUITE("frontend")
{

TEST_CASE("literals")
{
	Location here;
	CHECK(parse_number("8'hff", here).bits == std::vector<bool>(8, true));
	CHECK(parse_number("8'hff", here).sized);
	CHECK(parse_number("4'b1010", here).bits == std::vector<bool>{false, true, false, true});
	CHECK(parse_number("42", here).value() == 42);
	CHECK_FALSE(parse_number("42", here).sized);
	CHECK(parse_number("'b1", here).value() == 1);
	CHECK(parse_number("0b1", here).value() == 1);
	CHECK(parse_number("3'd5", here).value() == 5);
	CHECK(parse_number("16'h8_000", here).value() == 0x8000);
}

TEST_CASE("example module elaborates to six assignments")
{
	auto design = elaborate_unit(corpus_unit({"two_secret_example.v"}, "example"));
	CHECK(design.assignments().size() == 6);
	CHECK(design.high_bits.size() == 2);
	CHECK(design.declared_high_width == 2);
	auto i = design.find_net("i");
	REQUIRE(i);
	CHECK(design.high_bits.count(BitRef{*i, 0}));
	CHECK(design.high_bits.count(BitRef{*i, 1}));
}

TEST_CASE("pipeline copy benchmark elaborates its assignments")
{
	auto design = elaborate_unit(corpus_unit({"aes_t2100_tsc.v"}, "TSC"), {"key"});
	CHECK(design.assignments().size() == 320);
	CHECK(design.high_bits.size() == 128);
}

TEST_CASE("in-source markers")
{
	auto design = elaborate_unit(inline_unit(R"(
module m((* qflow_high *) input [3:0] a, input [1:0] b, output [3:0] y);
	assign y = a ^ {b, b};
endmodule
)",
						 "m"));
	CHECK(design.high_bits.size() == 4);

	auto trailing = elaborate_unit(inline_unit(R"(
module m(a, b, y);
	input [1:0] a; // qflow: high
	input b;
	output [1:0] y;
	assign y = a & {b, b};
endmodule
)",
						   "m"));
	CHECK(trailing.high_bits.size() == 2);
}

TEST_CASE("ANSI and non-ANSI headers agree")
{
	auto ansi = elaborate_unit(inline_unit("module m(input [3:0] a, output [3:0] y); assign y = ~a; endmodule", "m"));
	auto plain = elaborate_unit(inline_unit(R"(
module m(a, y);
	input [3:0] a;
	output [3:0] y;
	assign y = ~a;
endmodule
)",
						"m"));
	REQUIRE(ansi.nets.size() == plain.nets.size());
	for (std::size_t n = 0; n < ansi.nets.size(); ++n) {
		CHECK(ansi.nets[n].name == plain.nets[n].name);
		CHECK(ansi.nets[n].width == plain.nets[n].width);
		CHECK(ansi.nets[n].kind == plain.nets[n].kind);
	}
}

TEST_CASE("parameter overrides size instance nets")
{
	auto design = elaborate_unit(inline_unit(R"(
module leaf #(parameter W = 2) (input [W-1:0] a, output [W-1:0] y);
	assign y = a;
endmodule
module top(input [7:0] x, output [7:0] z);
	leaf #(.W(8)) u (.a(x), .y(z));
endmodule
)",
						 "top"));
	auto a = design.find_net("u.a");
	REQUIRE(a);
	CHECK(design.nets[*a].width == 8);
}

TEST_CASE("generate-for unrolls with indexed prefixes")
{
	auto design = elaborate_unit(inline_unit(R"(
module m(input [3:0] a, output [3:0] y);
	genvar i;
	generate
		for (i = 0; i < 4; i = i + 1) begin : g
			wire t;
			assign t = ~a[i];
			assign y[i] = t;
		end
	endgenerate
endmodule
)",
						 "m"));
	CHECK(design.find_net("g[0].t"));
	CHECK(design.find_net("g[3].t"));
	CHECK_FALSE(design.find_net("g[4].t"));
	CHECK(design.assignments().size() == 8);
}

TEST_CASE("elaboration errors")
{
	CHECK_THROWS_AS(elaborate_unit(inline_unit("module m(input a, output y); assign y = b; endmodule", "m")),
			UnknownSignal);
	CHECK_THROWS_AS(elaborate_unit(inline_unit(R"(
module a(input x, output y); b u(.x(x), .y(y)); endmodule
module b(input x, output y); a u(.x(x), .y(y)); endmodule
)",
						   "a")),
			RecursiveInstantiation);
	CHECK_THROWS_AS(elaborate_unit(inline_unit(R"(
module m(input [3:0] a, input [1:0] n, output [3:0] y);
	genvar i;
	generate for (i = 0; i < n; i = i + 1) begin : g assign y[i] = a[i]; end endgenerate
endmodule
)",
						   "m")),
			NonConstantGenerateBound);
	CHECK_THROWS_AS(elaborate_unit(inline_unit(R"(
module m(input a, input b, output y);
	assign y = a;
	assign y = b;
endmodule
)",
						   "m")),
			ElaborationError);
	CHECK_THROWS_AS(elaborate_unit(inline_unit(R"(
module leaf(input [3:0] a, output y); assign y = a[0]; endmodule
module top(input [1:0] x, output y); leaf u(.a(x), .y(y)); endmodule
)",
						   "top")),
			WidthMismatch);
	CHECK_THROWS_AS(elaborate_unit(inline_unit("module m(input a, output y); wire w; assign w = a; assign y = w; endmodule",
						   "m"),
				       {"w"}),
			LabelOnNonInput);
}

TEST_CASE("unsupported constructs and syntax errors")
{
	CHECK_THROWS_AS(elaborate_unit(inline_unit("module m(input a, output reg y); initial y = 0; endmodule", "m")),
			UnsupportedConstruct);
	try {
		elaborate_unit(inline_unit("module m(input a, output y);\n assign y = a +;\nendmodule", "m"));
		FAIL("expected a syntax error");
	} catch (const SyntaxError &e) {
		CHECK(e.location().line == 2);
	}
}

TEST_CASE("multiple clock domains are rejected")
{
	CHECK_THROWS_AS(elaborate_unit(inline_unit(R"(
module m(input c1, input c2, input d, output reg q1, output reg q2);
	always @(posedge c1) q1 <= d;
	always @(posedge c2) q2 <= d;
endmodule
)",
						   "m")),
			UnsupportedConstruct);
}

}
