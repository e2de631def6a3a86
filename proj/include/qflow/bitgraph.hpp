/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/bitref.hpp"
#include "qflow/frontend/elaborate.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace qflow {

using NodeId = std::int32_t;

enum class Op : std::uint8_t
{
	Const0,
	Const1,
	Leaf,
	Not,
	And,
	Or,
	Xor,
	/// kids = {sel, a, b}: sel ? a : b
	Mux,
	Macro,
};

/**
 * Word-level operators kept whole. kids hold operand a (LSB first) followed by
 * operand b of equal width w. Add and Sub yield bit w-1 of (a ± b) mod 2^w; the
 * comparisons are unsigned.
 */
enum class MacroKind : std::uint8_t
{
	Add,
	Sub,
	Eq,
	Ne,
	Lt,
	Le,
};

const char *macro_name(MacroKind kind);
bool macro_eval(MacroKind kind, const std::vector<bool> &a, const std::vector<bool> &b);

enum class BitRole
{
	InputHigh,
	InputLow,
	Register,
	Internal,
	TopOutput,
};

struct Node
{
	Op op = Op::Const0;
	MacroKind macro = MacroKind::Add;
	BitRef leaf;
	std::vector<NodeId> kids;

	bool operator==(const Node &) const = default;
	bool is_const() const { return op == Op::Const0 || op == Op::Const1; }
	int macro_width() const { return static_cast<int>(kids.size() / 2); }
};

struct BitBlastOptions
{
	/// Add, sub and compare wider than this many non-constant bit positions stay macros.
	int macro_threshold = 4;
	/// Simplify gates with one constant operand (x & 0, x | 1, ...). Gates whose
	/// operands are all constant are always evaluated.
	bool fold_constants = false;
};

/// A bind tree: the function of one top-output bit or the next state of one register bit.
struct Root
{
	BitRef bit;
	NodeId node = -1;
	bool is_output = false;
	bool is_register = false;
};

/**
 * Hash-consed bind forest. Shared subgraphs are stored once; every root still
 * denotes its own tree. Leaves are top-input bits and register bits.
 */
class Forest
{
      public:
	explicit Forest(bool fold_constants = false) : fold_(fold_constants) {}

	NodeId constant(bool value);
	NodeId leaf(const BitRef &bit);
	NodeId make(Op op, std::vector<NodeId> kids);
	NodeId macro(MacroKind kind, const std::vector<NodeId> &a, const std::vector<NodeId> &b);

	const Node &node(NodeId id) const { return nodes_[id]; }
	std::size_t size() const { return nodes_.size(); }

	/// Evaluate a node with the given leaf values.
	bool eval(NodeId id, const std::function<bool(const BitRef &)> &leaf_value) const;

	std::vector<Root> roots;
	std::vector<frontend::Net> nets;
	/// Secret bits in stable order; the position is the secret-bit id.
	std::vector<BitRef> high_bits;
	std::set<BitRef> registers;
	int declared_high_width = 0;

	int secret_id(const BitRef &bit) const;
	BitRole role(const BitRef &bit) const;
	std::string bit_name(const BitRef &bit) const;
	std::optional<std::size_t> root_of(const BitRef &bit) const;
	void index_roots();

	std::string sexpr(NodeId id) const;
	/// One `name = sexpr` line per root in root order.
	std::string dump() const;

      private:
	struct NodeHash
	{
		std::size_t operator()(const Node &n) const noexcept;
	};

	NodeId intern(Node n);
	NodeId fold(Op op, const std::vector<NodeId> &kids);

	bool fold_;
	std::vector<Node> nodes_;
	std::unordered_map<Node, NodeId, NodeHash> interned_;
	std::unordered_map<BitRef, std::size_t, BitRefHash> root_index_;
	std::unordered_map<BitRef, int, BitRefHash> secret_index_;
};

/// Errors: CombinationalLoop, UnassignedNet.
Forest bit_blast(const frontend::ElaboratedDesign &design, const BitBlastOptions &options = {});

/**
 * Edges run from a root to the roots of the register leaves its tree reads.
 * SCCs are listed dependency-first; a component is cyclic when it has more
 * than one root or a self edge.
 */
struct DependencyGraph
{
	std::vector<std::vector<std::size_t>> edges;
	std::vector<std::vector<std::size_t>> sccs;
	std::vector<bool> cyclic;
	std::vector<std::size_t> scc_of;
};

DependencyGraph compute_dependencies(const Forest &forest);

/// Register leaves read by the tree under `id`, sorted.
std::vector<BitRef> register_leaves(const Forest &forest, NodeId id);

} // namespace qflow
