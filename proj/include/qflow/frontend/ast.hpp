/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/errors.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qflow::frontend {

/// One input file. `text` must be valid UTF-8; only ASCII is meaningful to the lexer.
struct SourceFile
{
	std::string path;
	std::string text;
};

struct SourceUnit
{
	std::vector<SourceFile> files;
	std::string top_module;
};

/// Two-valued literal, bits stored LSB first.
struct Literal
{
	std::vector<bool> bits;
	bool sized = false;

	int width() const { return static_cast<int>(bits.size()); }
	/// Value truncated to 64 bits.
	unsigned long long value() const;
	static Literal from_value(unsigned long long v, int width, bool sized);
};

enum class ExprKind
{
	Identifier,
	Number,
	Unary,
	Binary,
	Ternary,
	Concat,
	Replicate,
	BitSelect,
	PartSelect,
	IndexedPartSelect,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression node. Selects always apply to a named signal (`name`), as in Verilog-2005.
struct Expr
{
	ExprKind kind;
	Location loc;
	std::string name;
	std::string op;
	Literal literal;
	/// IndexedPartSelect: true for `+:`, false for `-:`.
	bool ascending = true;
	std::vector<ExprPtr> operands;
};

struct Range
{
	ExprPtr msb;
	ExprPtr lsb;
};

enum class NetType
{
	Implicit,
	Wire,
	Reg,
};

enum class PortDirection
{
	Input,
	Output,
};

enum class Label
{
	Low,
	High,
};

struct NetDecl
{
	Location loc;
	NetType type = NetType::Implicit;
	std::optional<PortDirection> direction;
	std::optional<Range> range;
	std::vector<std::string> names;
	/// Set by any of the three in-source High markers.
	bool high = false;
	/// `wire x = expr;` declaration assignment, only for single-name declarations.
	ExprPtr init;
};

struct ParamDecl
{
	Location loc;
	bool local = false;
	std::optional<Range> range;
	std::string name;
	ExprPtr value;
};

struct ContinuousAssign
{
	Location loc;
	ExprPtr lhs;
	ExprPtr rhs;
};

enum class StmtKind
{
	Block,
	Blocking,
	NonBlocking,
	If,
	Case,
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct CaseItem
{
	/// Empty for `default`.
	std::vector<ExprPtr> labels;
	StmtPtr body;
};

struct Stmt
{
	StmtKind kind;
	Location loc;
	ExprPtr lhs;
	ExprPtr rhs;
	ExprPtr cond;
	std::vector<StmtPtr> body;
	StmtPtr then_branch;
	StmtPtr else_branch;
	std::vector<CaseItem> items;
};

struct EdgeEvent
{
	bool posedge = true;
	std::string signal;
};

struct AlwaysBlock
{
	Location loc;
	/// Empty means combinational (`@(*)`, `@*` or a level-sensitive list).
	std::vector<EdgeEvent> edges;
	StmtPtr body;
};

struct Connection
{
	/// Empty for positional connections.
	std::string port;
	/// Null for explicitly unconnected ports `.p()`.
	ExprPtr expr;
};

struct Instance
{
	Location loc;
	std::string module;
	std::string name;
	std::vector<Connection> parameters;
	std::vector<Connection> connections;
};

struct GenvarDecl
{
	Location loc;
	std::vector<std::string> names;
};

struct ModuleItem;

struct GenerateFor
{
	Location loc;
	std::string genvar;
	ExprPtr init;
	ExprPtr cond;
	ExprPtr step;
	std::string label;
	std::vector<ModuleItem> items;
};

struct ModuleItem
{
	std::variant<NetDecl, ParamDecl, ContinuousAssign, AlwaysBlock, Instance, GenvarDecl, GenerateFor> node;
};

struct Module
{
	std::string name;
	Location loc;
	std::vector<std::string> ports;
	std::vector<ParamDecl> header_params;
	std::vector<ModuleItem> items;

	/// Port declaration for `name`, merging the ANSI header with body redeclarations.
	std::optional<PortDirection> port_direction(const std::string &name) const;
};

struct Ast
{
	std::vector<Module> modules;

	const Module *find(const std::string &name) const;
};

} // namespace qflow::frontend
