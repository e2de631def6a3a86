/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/bitref.hpp"
#include "qflow/frontend/ast.hpp"
#include "qflow/frontend/labels.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qflow::frontend {

enum class NetKind
{
	Input,
	Output,
	Wire,
	Reg,
};

/// A flat net. Names of nets inside instances or generate blocks are dotted paths.
struct Net
{
	std::string name;
	int width = 1;
	int msb = 0;
	int lsb = 0;
	NetKind kind = NetKind::Wire;
	bool top_port = false;
	Location loc;

	/// LSB-based offset of a declared index; nullopt when out of range.
	std::optional<int> offset_of(long long index) const;
	/// Declared index of an LSB-based offset.
	int index_of(int offset) const;
};

enum class RKind
{
	Net,
	Const,
	Unary,
	Binary,
	Ternary,
	Concat,
	DynSelect,
};

enum class UnaryOp
{
	BitNot,
	LogicNot,
	Negate,
	RedAnd,
	RedOr,
	RedXor,
	RedNand,
	RedNor,
	RedXnor,
};

enum class BinaryOp
{
	And,
	Or,
	Xor,
	Xnor,
	Add,
	Sub,
	Shl,
	Shr,
	Eq,
	Ne,
	Lt,
	Le,
	Gt,
	Ge,
	LogicAnd,
	LogicOr,
};

struct RExpr;
using RExprPtr = std::shared_ptr<const RExpr>;

/**
 * Resolved expression: names bound to flat nets, parameters and genvars folded.
 * `width` is the self-determined width. Net is a slice [offset, offset+width) of
 * `net`; DynSelect picks one bit of `net` by the value of args[0].
 */
struct RExpr
{
	RKind kind = RKind::Const;
	int width = 1;
	int net = -1;
	int offset = 0;
	std::vector<bool> bits;
	UnaryOp unary = UnaryOp::BitNot;
	BinaryOp binary = BinaryOp::And;
	std::vector<RExprPtr> args;
	Location loc;
};

struct LhsSegment
{
	int net = -1;
	int offset = 0;
	int width = 1;
};

/// Assignment target; segments are MSB first as written in a concatenation.
struct Lvalue
{
	std::vector<LhsSegment> segments;

	int width() const;
};

enum class RStmtKind
{
	Block,
	Assign,
	If,
	Case,
};

struct RStmt;
using RStmtPtr = std::shared_ptr<const RStmt>;

struct RCaseItem
{
	std::vector<RExprPtr> labels;
	RStmtPtr body;
};

struct RStmt
{
	RStmtKind kind = RStmtKind::Block;
	Location loc;
	Lvalue lhs;
	RExprPtr rhs;
	bool nonblocking = false;
	RExprPtr cond;
	std::vector<RStmtPtr> body;
	RStmtPtr then_branch;
	RStmtPtr else_branch;
	std::vector<RCaseItem> items;
};

enum class ProcessKind
{
	Continuous,
	Combinational,
	Sequential,
};

struct Process
{
	ProcessKind kind = ProcessKind::Continuous;
	int clock_net = -1;
	bool posedge = true;
	RStmtPtr body;
	Location loc;
};

/// Flat view of one assignment statement.
struct Assignment
{
	Lvalue target;
	RExprPtr expr;
	bool sequential = false;
	int clock_net = -1;
	bool posedge = true;
};

struct ElaboratedDesign
{
	std::string top;
	std::vector<Net> nets;
	std::vector<Process> processes;
	/// High bits, projected onto top-level input nets.
	std::set<BitRef> high_bits;
	/// Sum of widths of every net that carried a High label before projection.
	int declared_high_width = 0;

	std::vector<Assignment> assignments() const;
	std::optional<int> find_net(const std::string &name) const;
	/// `name[index]`, or plain `name` for 1-bit nets.
	std::string bit_name(const BitRef &bit) const;
};

ElaboratedDesign elaborate(const Ast &ast, const std::string &top, const SecurityLabelMap &labels);

} // namespace qflow::frontend
