/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/frontend/lexer.hpp"

#include <array>
#include <cctype>
#include <regex>

namespace qflow::frontend {

namespace {

constexpr std::array<std::string_view, 21> kMultiCharSymbols = {
    "<<<", ">>>", "===", "!==", "<<", ">>", "<=", ">=", "==", "!=", "&&",
    "||",  "~&",  "~|",  "~^",  "^~", "+:", "-:", "**", "(*", "*)",
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

bool is_high_comment(std::string_view body)
{
	static const std::regex pattern(R"(^\s*qflow\s*:\s*high\b)", std::regex::icase);
	return std::regex_search(std::string(body), pattern);
}

class Lexer
{
      public:
	Lexer(const std::string &path, std::string_view text) : path_(path), text_(text) {}

	LexResult run()
	{
		LexResult out;
		while (true) {
			skip_space_and_comments(out);
			if (pos_ >= text_.size())
				break;
			out.tokens.push_back(next_token());
		}
		out.tokens.push_back(Token{TokenKind::EndOfFile, "", here()});
		return out;
	}

      private:
	Location here() const { return Location{path_, line_, col_}; }

	char peek(size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

	void advance(size_t n = 1)
	{
		for (size_t i = 0; i < n && pos_ < text_.size(); ++i) {
			if (text_[pos_] == '\n') {
				++line_;
				col_ = 1;
			} else {
				++col_;
			}
			++pos_;
		}
	}

	void skip_space_and_comments(LexResult &out)
	{
		while (pos_ < text_.size()) {
			char c = peek();
			if (std::isspace(static_cast<unsigned char>(c))) {
				advance();
			} else if (c == '/' && peek(1) == '/') {
				int line = line_;
				size_t start = pos_ + 2;
				while (pos_ < text_.size() && peek() != '\n')
					advance();
				if (is_high_comment(text_.substr(start, pos_ - start)) && !out.tokens.empty() &&
				    out.tokens.back().loc.line == line)
					out.tokens.back().high_comment = true;
			} else if (c == '/' && peek(1) == '*') {
				Location loc = here();
				advance(2);
				while (pos_ < text_.size() && !(peek() == '*' && peek(1) == '/'))
					advance();
				if (pos_ >= text_.size())
					throw SyntaxError(loc, "unterminated block comment");
				advance(2);
			} else if (c == '`') {
				skip_directive();
			} else {
				break;
			}
		}
	}

	void skip_directive()
	{
		Location loc = here();
		size_t start = pos_ + 1;
		size_t end = start;
		while (end < text_.size() && is_ident_char(text_[end]))
			++end;
		std::string name(text_.substr(start, end - start));
		if (name != "timescale" && name != "default_nettype" && name != "resetall" && name != "celldefine" &&
		    name != "endcelldefine")
			throw UnsupportedConstruct("compiler directive `" + name, loc);
		while (pos_ < text_.size() && peek() != '\n')
			advance();
	}

	Token next_token()
	{
		Location loc = here();
		char c = peek();
		if (is_ident_start(c)) {
			size_t start = pos_;
			while (is_ident_char(peek()))
				advance();
			return Token{TokenKind::Identifier, std::string(text_.substr(start, pos_ - start)), loc};
		}
		if (c == '\\')
			throw UnsupportedConstruct("escaped identifier", loc);
		if (c == '$')
			throw UnsupportedConstruct("system task or function", loc);
		if (std::isdigit(static_cast<unsigned char>(c)) || (c == '\'' && std::isalpha(static_cast<unsigned char>(peek(1)))))
			return number(loc);
		if (c == '"')
			throw UnsupportedConstruct("string literal", loc);

		// `@(*)` must not open an attribute.
		if (c == '(' && peek(1) == '*' && peek(2) == ')') {
			advance();
			return Token{TokenKind::Symbol, "(", loc};
		}
		for (std::string_view sym : kMultiCharSymbols) {
			if (text_.substr(pos_, sym.size()) == sym) {
				if (sym == "(*") {
					advance(2);
					in_attribute_ = true;
					return Token{TokenKind::AttributeOpen, "(*", loc};
				}
				if (sym == "*)") {
					if (!in_attribute_)
						break;
					advance(2);
					in_attribute_ = false;
					return Token{TokenKind::AttributeClose, "*)", loc};
				}
				advance(sym.size());
				return Token{TokenKind::Symbol, std::string(sym), loc};
			}
		}
		static const std::string_view singles = "()[]{};,.:?#@=+-*/%&|^~!<>";
		if (singles.find(c) != std::string_view::npos) {
			advance();
			return Token{TokenKind::Symbol, std::string(1, c), loc};
		}
		throw SyntaxError(loc, std::string("unexpected character '") + c + "'");
	}

	// Numbers keep their source spelling; the parser converts them. Whitespace between
	// the size, the base and the digits is folded away.
	Token number(const Location &loc)
	{
		std::string text;
		while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_')
			text += text_[pos_], advance();
		// C-style literals such as 0b1 or 0x1f.
		if (text == "0" && (peek() == 'b' || peek() == 'B' || peek() == 'x' || peek() == 'X')) {
			text += text_[pos_];
			advance();
			while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
				text += text_[pos_], advance();
			return Token{TokenKind::Number, text, loc};
		}
		size_t save_pos = pos_;
		int save_line = line_, save_col = col_;
		while (peek() == ' ' || peek() == '\t')
			advance();
		if (peek() != '\'') {
			pos_ = save_pos, line_ = save_line, col_ = save_col;
			return Token{TokenKind::Number, text, loc};
		}
		text += '\'';
		advance();
		if (peek() == 's' || peek() == 'S')
			text += text_[pos_], advance();
		if (!std::isalpha(static_cast<unsigned char>(peek())))
			throw SyntaxError(here(), "expected base after '");
		text += text_[pos_];
		advance();
		while (peek() == ' ' || peek() == '\t')
			advance();
		while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '?')
			text += text_[pos_], advance();
		return Token{TokenKind::Number, text, loc};
	}

	std::string path_;
	std::string_view text_;
	size_t pos_ = 0;
	int line_ = 1;
	int col_ = 1;
	bool in_attribute_ = false;
};

} // namespace

LexResult lex(const std::string &path, std::string_view text) { return Lexer(path, text).run(); }

} // namespace qflow::frontend
