/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/errors.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace qflow::frontend {

enum class TokenKind
{
	Identifier,
	Number,
	Symbol,
	AttributeOpen,
	AttributeClose,
	EndOfFile,
};

struct Token
{
	TokenKind kind;
	std::string text;
	Location loc;
	/// A `// qflow: high` comment follows this token on the same line.
	bool high_comment = false;

	bool is(std::string_view s) const { return (kind == TokenKind::Symbol || kind == TokenKind::Identifier) && text == s; }
};

struct LexResult
{
	std::vector<Token> tokens;
};

LexResult lex(const std::string &path, std::string_view text);

} // namespace qflow::frontend
