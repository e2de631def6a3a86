/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "support/corpus.hpp"

#include "qflow/channelizer.hpp"
#include "qflow/oracle.hpp"

#include <doctest.h>

#include <functional>
#include <random>

using namespace qflow;
using qflow::testing::corpus_unit;
using qflow::testing::elaborate_unit;
using qflow::testing::inline_unit;

namespace {

struct Built
{
	Forest forest;
	DependencyGraph deps;
};

Built build(const frontend::SourceUnit &unit, const std::vector<std::string> &high = {})
{
	Built b{bit_blast(elaborate_unit(unit, high)), {}};
	b.deps = compute_dependencies(b.forest);
	return b;
}

bool compose(const ChannelGraph &g, int c, const std::function<bool(const BitRef &)> &leaf)
{
	const Channel &ch = g.channels[c];
	std::vector<bool> in;
	for (const ChannelInput &i : ch.inputs) {
		if (i.label != InputLabel::Derived || i.crosses_register())
			in.push_back(leaf(i.bit));
		else
			in.push_back(compose(g, i.source, leaf));
	}
	return channel_function_eval(ch, in);
}

std::vector<BitRef> leaves_of(const Forest &f)
{
	std::set<BitRef> out(f.registers.begin(), f.registers.end());
	for (std::size_t id = 0; id < f.size(); ++id)
		if (f.node(static_cast<NodeId>(id)).op == Op::Leaf)
			out.insert(f.node(static_cast<NodeId>(id)).leaf);
	return {out.begin(), out.end()};
}

/// Structural and functional checks shared by every design and bound.
void check_graph(const Built &b, int max_inputs)
{
	ChannelGraph g = merge(b.forest, b.deps, max_inputs);
	REQUIRE(g.root_channel.size() == b.forest.roots.size());
	for (const Channel &ch : g.channels) {
		if (!ch.macro) {
			std::size_t own = b.forest.node(ch.node).kids.size();
			CHECK_MESSAGE(ch.arity() <= std::max<std::size_t>(static_cast<std::size_t>(max_inputs), own),
				      "channel " << ch.id << " node " << b.forest.sexpr(ch.node));
		}
		for (const ChannelInput &in : ch.inputs)
			if (in.label != InputLabel::Derived)
				CHECK_FALSE(b.forest.registers.count(in.bit));
	}

	std::vector<BitRef> leaves = leaves_of(b.forest);
	const bool exhaustive = leaves.size() <= 14;
	const std::uint64_t runs = exhaustive ? (1ull << leaves.size()) : 2048;
	std::mt19937_64 rng(11);
	for (std::uint64_t r = 0; r < runs; ++r) {
		std::map<BitRef, bool> value;
		for (std::size_t i = 0; i < leaves.size(); ++i)
			value[leaves[i]] = exhaustive ? (r >> i) & 1 : rng() & 1;
		auto leaf = [&](const BitRef &bit) { return value.at(bit); };
		for (std::size_t root = 0; root < b.forest.roots.size(); ++root)
			if (compose(g, g.root_channel[root], leaf) != b.forest.eval(b.forest.roots[root].node, leaf)) {
				FAIL_CHECK("root " << root << " differs at bound " << max_inputs);
				return;
			}
	}
}

} // namespace

TEST_SUITE("channelizer")
{

TEST_CASE("example merges into two channels at bound 3")
{
	Built b = build(corpus_unit({"two_secret_example.v"}, "example"));
	ChannelGraph g = merge(b.forest, b.deps, 3);
	REQUIRE(g.channels.size() == 2);
	std::string dump = dump_channels(g, b.forest);
	CHECK(dump.find("inputs=[H:i[0] H:i[1] L:low] table=0x8f") != std::string::npos);
	CHECK(dump.find("inputs=[H:i[0] H:i[1]] table=0xf") != std::string::npos);
}

TEST_CASE("example at bound 1 keeps gates separate")
{
	Built b = build(corpus_unit({"two_secret_example.v"}, "example"));
	ChannelGraph g = merge(b.forest, b.deps, 1);
	CHECK(g.channels.size() > 2);
	check_graph(b, 1);
}

TEST_CASE("bound is validated")
{
	Built b = build(corpus_unit({"two_secret_example.v"}, "example"));
	CHECK_THROWS_AS(merge(b.forest, b.deps, 0), ConfigError);
	CHECK_THROWS_AS(merge(b.forest, b.deps, 17), ConfigError);
	CHECK_NOTHROW(merge(b.forest, b.deps, 16));
}

TEST_CASE("channel functions")
{
	Channel identity;
	identity.inputs.resize(1);
	identity.table = {0b10};
	CHECK(channel_function_eval(identity, {true}));
	CHECK_FALSE(channel_function_eval(identity, {false}));
	CHECK_THROWS_AS(channel_function_eval(identity, {true, false}), ArityMismatch);

	Channel eq;
	eq.inputs.resize(4);
	eq.macro = MacroDescriptor{MacroKind::Eq, 2, {0, 1, 2, 3}};
	CHECK(channel_function_eval(eq, {true, false, true, false}));
	CHECK_FALSE(channel_function_eval(eq, {true, false, false, false}));

	Channel lt;
	lt.inputs.resize(2);
	lt.macro = MacroDescriptor{MacroKind::Lt, 2, {0, MacroDescriptor::kConst0, 1, MacroDescriptor::kConst1}};
	// a = {x0, 0}, b = {x1, 1}: a < b always
	for (int r = 0; r < 4; ++r)
		CHECK(channel_function_eval(lt, {bool(r & 1), bool(r & 2)}));
}

TEST_CASE("bounded merging preserves every root function")
{
	std::vector<Built> designs;
	designs.push_back(build(corpus_unit({"two_secret_example.v"}, "example")));
	designs.push_back(build(corpus_unit({"toy_spn2.v"}, "spn_round")));
	designs.push_back(build(corpus_unit({"toy_spn2.v"}, "toy_spn2")));
	designs.push_back(build(corpus_unit({"aes_t2300_tsc.v"}, "TSC"), {"key"}));
	designs.push_back(build(inline_unit(
		"module m(input [7:0] a, input [7:0] b, output s, output [1:0] t); assign s = a < b; assign t = a + b; endmodule",
		"m")));
	for (std::uint64_t seed = 100; seed < 130; ++seed)
		designs.push_back(build(inline_unit(random_circuit(seed), "rc")));
	for (const Built &b : designs)
		for (int bound : {1, 2, 3, 5, 8})
			check_graph(b, bound);
}

TEST_CASE("register boundaries become derived inputs")
{
	Built b = build(corpus_unit({"toy_spn2.v"}, "toy_spn2"));
	ChannelGraph g = merge(b.forest, b.deps, 5);
	int crossing = 0;
	for (const Channel &ch : g.channels)
		for (const ChannelInput &in : ch.inputs)
			if (in.crosses_register()) {
				++crossing;
				CHECK(b.forest.registers.count(in.bit));
				REQUIRE(in.source >= 0);
				CHECK(g.channels[in.source].root == static_cast<int>(*b.forest.root_of(in.bit)));
			}
	CHECK(crossing > 0);
}

}
