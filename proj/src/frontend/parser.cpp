/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/frontend/parser.hpp"
#include "qflow/frontend/lexer.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace qflow::frontend {

unsigned long long Literal::value() const
{
	unsigned long long v = 0;
	for (int i = std::min(width(), 64) - 1; i >= 0; --i)
		v = (v << 1) | (bits[i] ? 1ull : 0ull);
	return v;
}

Literal Literal::from_value(unsigned long long v, int width, bool sized)
{
	Literal lit;
	lit.sized = sized;
	lit.bits.resize(width);
	for (int i = 0; i < width && i < 64; ++i)
		lit.bits[i] = (v >> i) & 1;
	return lit;
}

const Module *Ast::find(const std::string &name) const
{
	for (const Module &m : modules)
		if (m.name == name)
			return &m;
	return nullptr;
}

std::optional<PortDirection> Module::port_direction(const std::string &name) const
{
	for (const ModuleItem &item : items)
		if (const auto *decl = std::get_if<NetDecl>(&item.node))
			if (decl->direction && std::find(decl->names.begin(), decl->names.end(), name) != decl->names.end())
				return decl->direction;
	return std::nullopt;
}

namespace {

int digit_value(char c)
{
	if (std::isdigit(static_cast<unsigned char>(c)))
		return c - '0';
	return std::tolower(static_cast<unsigned char>(c)) - 'a' + 10;
}

void reject_xz(const std::string &digits, const Location &loc)
{
	for (char c : digits) {
		char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
		if (l == 'x' || l == 'z' || l == '?')
			throw SyntaxError(loc, "x/z digits are not supported in literals (two-valued logic only)");
	}
}

// Decimal digit string to bits, arbitrary length.
std::vector<bool> decimal_bits(std::string digits)
{
	std::vector<bool> bits;
	while (!(digits.empty() || digits == "0")) {
		std::string quotient;
		int rem = 0;
		for (char c : digits) {
			int cur = rem * 10 + (c - '0');
			int q = cur / 2;
			rem = cur % 2;
			if (!quotient.empty() || q)
				quotient += static_cast<char>('0' + q);
		}
		bits.push_back(rem);
		digits = quotient;
	}
	return bits;
}

std::vector<bool> radix_bits(const std::string &digits, int bits_per_digit, const Location &loc)
{
	std::vector<bool> bits;
	for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
		int v = digit_value(*it);
		if (v < 0 || v >= (1 << bits_per_digit))
			throw SyntaxError(loc, std::string("invalid digit '") + *it + "' in literal");
		for (int b = 0; b < bits_per_digit; ++b)
			bits.push_back((v >> b) & 1);
	}
	return bits;
}

std::string strip_underscores(const std::string &s)
{
	std::string out;
	for (char c : s)
		if (c != '_')
			out += c;
	return out;
}

} // namespace

Literal parse_number(const std::string &raw, const Location &loc)
{
	std::string text = strip_underscores(raw);
	Literal lit;
	if (text.size() > 2 && text[0] == '0' && (text[1] == 'b' || text[1] == 'B' || text[1] == 'x' || text[1] == 'X')) {
		std::string digits = text.substr(2);
		reject_xz(text[1] == 'b' || text[1] == 'B' ? digits : std::string(), loc);
		lit.bits = radix_bits(digits, (text[1] == 'b' || text[1] == 'B') ? 1 : 4, loc);
		lit.sized = false;
		if (lit.bits.size() < 32)
			lit.bits.resize(32, false);
		return lit;
	}
	size_t tick = text.find('\'');
	if (tick == std::string::npos) {
		lit.bits = decimal_bits(text);
		lit.sized = false;
		if (lit.bits.size() < 32)
			lit.bits.resize(32, false);
		return lit;
	}
	int size = -1;
	if (tick > 0) {
		size = std::stoi(text.substr(0, tick));
		if (size <= 0)
			throw SyntaxError(loc, "literal size must be positive");
	}
	size_t p = tick + 1;
	if (p < text.size() && (text[p] == 's' || text[p] == 'S'))
		throw UnsupportedConstruct("signed literal", loc);
	if (p >= text.size())
		throw SyntaxError(loc, "missing base in literal");
	char base = static_cast<char>(std::tolower(static_cast<unsigned char>(text[p])));
	std::string digits = text.substr(p + 1);
	if (digits.empty())
		throw SyntaxError(loc, "missing digits in literal");
	reject_xz(digits, loc);
	switch (base) {
	case 'b':
		lit.bits = radix_bits(digits, 1, loc);
		break;
	case 'o':
		lit.bits = radix_bits(digits, 3, loc);
		break;
	case 'h':
		lit.bits = radix_bits(digits, 4, loc);
		break;
	case 'd':
		for (char c : digits)
			if (!std::isdigit(static_cast<unsigned char>(c)))
				throw SyntaxError(loc, "invalid decimal digit in literal");
		lit.bits = decimal_bits(digits);
		break;
	default:
		throw SyntaxError(loc, std::string("invalid literal base '") + base + "'");
	}
	lit.sized = size > 0;
	lit.bits.resize(size > 0 ? size : std::max<size_t>(32, lit.bits.size()), false);
	return lit;
}

namespace {

const std::set<std::string> kUnsupportedItems = {
    "initial", "function", "task", "specify", "primitive", "inout", "integer", "real", "time", "event",
    "defparam", "tri", "supply0", "supply1", "wand", "wor", "realtime", "program", "interface", "logic", "fork",
};

class Parser
{
      public:
	Parser(const SourceFile &file, LexResult lexed) : file_(file), tokens_(std::move(lexed.tokens)) {}

	void parse_into(Ast &ast)
	{
		while (!at_end()) {
			if (cur().kind == TokenKind::AttributeOpen) {
				parse_attributes();
				continue;
			}
			if (cur().is("module")) {
				ast.modules.push_back(parse_module());
				continue;
			}
			if (cur().is("macromodule") || cur().is("primitive"))
				throw UnsupportedConstruct(cur().text, cur().loc);
			throw SyntaxError(cur().loc, "expected 'module', found '" + cur().text + "'");
		}
	}

      private:
	// ---- token helpers ----
	const Token &cur() const { return tokens_[pos_]; }
	const Token &peek_tok(size_t ahead = 1) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
	bool at_end() const { return cur().kind == TokenKind::EndOfFile; }
	const Token &take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

	bool accept(std::string_view s)
	{
		if (cur().is(s)) {
			++pos_;
			return true;
		}
		return false;
	}

	const Token &expect(std::string_view s)
	{
		if (!cur().is(s))
			throw SyntaxError(cur().loc, "expected '" + std::string(s) + "', found '" + describe(cur()) + "'");
		return take();
	}

	std::string describe(const Token &t) const { return t.kind == TokenKind::EndOfFile ? "end of file" : t.text; }

	std::string expect_identifier()
	{
		if (cur().kind != TokenKind::Identifier || is_keyword(cur().text))
			throw SyntaxError(cur().loc, "expected identifier, found '" + describe(cur()) + "'");
		return take().text;
	}

	static bool is_keyword(const std::string &s)
	{
		static const std::set<std::string> keywords = {
		    "module", "endmodule", "input", "output", "inout", "wire", "reg", "assign", "always", "begin", "end",
		    "if", "else", "case", "casex", "casez", "endcase", "default", "posedge", "negedge", "or", "generate",
		    "endgenerate", "genvar", "for", "parameter", "localparam", "initial", "function", "task", "integer",
		    "signed"};
		return keywords.count(s) > 0;
	}

	// ---- attributes ----
	bool parse_attributes()
	{
		bool high = false;
		while (cur().kind == TokenKind::AttributeOpen) {
			take();
			while (cur().kind != TokenKind::AttributeClose) {
				if (at_end())
					throw SyntaxError(cur().loc, "unterminated attribute");
				if (cur().kind == TokenKind::Identifier && cur().text == "qflow_high")
					high = true;
				take();
			}
			take();
		}
		return high;
	}

	// ---- module ----
	Module parse_module()
	{
		Module m;
		m.loc = expect("module").loc;
		m.name = expect_identifier();
		if (accept("#")) {
			expect("(");
			if (!cur().is(")")) {
				do {
					accept("parameter");
					for (ParamDecl &p : parse_param_assignments(false))
						m.header_params.push_back(std::move(p));
				} while (accept(","));
			}
			expect(")");
		}
		if (accept("(")) {
			if (!cur().is(")"))
				parse_port_list(m);
			expect(")");
		}
		expect(";");
		while (!cur().is("endmodule")) {
			if (at_end())
				throw SyntaxError(cur().loc, "missing 'endmodule' for module '" + m.name + "'");
			parse_module_item(m, m.items, false);
		}
		take();
		return m;
	}

	void parse_port_list(Module &m)
	{
		bool ansi = cur().kind == TokenKind::AttributeOpen || cur().is("input") || cur().is("output") ||
			    cur().is("inout") || (cur().is("High") && (peek_tok().is("input") || peek_tok().is("output")));
		if (!ansi) {
			do {
				m.ports.push_back(expect_identifier());
			} while (accept(","));
			return;
		}
		NetDecl *last = nullptr;
		do {
			bool high = parse_attributes();
			if (cur().is("High") && (peek_tok().is("input") || peek_tok().is("output"))) {
				take();
				high = true;
			}
			if (cur().is("input") || cur().is("output") || cur().is("inout")) {
				NetDecl decl = parse_decl_head();
				decl.high = decl.high || high;
				std::string name = expect_identifier();
				decl.names.push_back(name);
				m.ports.push_back(name);
				m.items.push_back(ModuleItem{std::move(decl)});
				last = &std::get<NetDecl>(m.items.back().node);
			} else {
				// `input [3:0] a, b` continues the previous declaration.
				if (!last)
					throw SyntaxError(cur().loc, "port direction expected");
				std::string name = expect_identifier();
				last->names.push_back(name);
				m.ports.push_back(name);
			}
			// Trailing comment after the name or after its separator.
			if (last->direction == PortDirection::Input &&
			    (tokens_[pos_ - 1].high_comment || ((cur().is(",") || cur().is(")")) && cur().high_comment)))
				last->high = true;
		} while (accept(","));
	}

	// Direction, net type and range of a declaration; names are parsed by the caller.
	NetDecl parse_decl_head()
	{
		NetDecl decl;
		decl.loc = cur().loc;
		if (cur().is("inout"))
			throw UnsupportedConstruct("inout port", cur().loc);
		if (accept("input"))
			decl.direction = PortDirection::Input;
		else if (accept("output"))
			decl.direction = PortDirection::Output;
		if (accept("wire"))
			decl.type = NetType::Wire;
		else if (accept("reg"))
			decl.type = NetType::Reg;
		if (cur().is("signed"))
			throw UnsupportedConstruct("signed net", cur().loc);
		if (cur().is("integer") || cur().is("logic"))
			throw UnsupportedConstruct(cur().text + " declaration", cur().loc);
		if (cur().is("["))
			decl.range = parse_range();
		return decl;
	}

	Range parse_range()
	{
		expect("[");
		Range r;
		r.msb = parse_expr();
		expect(":");
		r.lsb = parse_expr();
		expect("]");
		return r;
	}

	void parse_module_item(Module &m, std::vector<ModuleItem> &items, bool in_generate)
	{
		const Token &t = cur();
		if (t.kind == TokenKind::AttributeOpen) {
			bool high = parse_attributes();
			size_t before = items.size();
			parse_module_item(m, items, in_generate);
			if (high) {
				if (items.size() == before + 1)
					if (auto *decl = std::get_if<NetDecl>(&items.back().node)) {
						decl->high = true;
						return;
					}
				throw SyntaxError(t.loc, "(* qflow_high *) must precede an input declaration");
			}
			return;
		}
		if (t.is("High") && peek_tok().is("input")) {
			take();
			size_t before = items.size();
			parse_module_item(m, items, in_generate);
			if (items.size() == before + 1)
				std::get<NetDecl>(items.back().node).high = true;
			return;
		}
		if (t.kind != TokenKind::Identifier)
			throw SyntaxError(t.loc, "unexpected '" + describe(t) + "' in module body");
		if (kUnsupportedItems.count(t.text))
			throw UnsupportedConstruct(t.text, t.loc);
		if (t.is("input") || t.is("output") || t.is("wire") || t.is("reg") || t.is("inout")) {
			items.push_back(ModuleItem{parse_net_decl()});
			if (in_generate && std::get<NetDecl>(items.back().node).direction)
				throw SyntaxError(t.loc, "port declaration inside generate block");
			return;
		}
		if (t.is("parameter") || t.is("localparam")) {
			bool local = take().text == "localparam";
			for (ParamDecl &p : parse_param_assignments(local))
				items.push_back(ModuleItem{std::move(p)});
			expect(";");
			return;
		}
		if (t.is("assign")) {
			Location loc = take().loc;
			if (cur().is("#"))
				throw UnsupportedConstruct("delay", cur().loc);
			do {
				ContinuousAssign a;
				a.loc = loc;
				a.lhs = parse_lvalue();
				expect("=");
				a.rhs = parse_expr();
				items.push_back(ModuleItem{std::move(a)});
			} while (accept(","));
			expect(";");
			return;
		}
		if (t.is("always")) {
			items.push_back(ModuleItem{parse_always()});
			return;
		}
		if (t.is("genvar")) {
			GenvarDecl g;
			g.loc = take().loc;
			do {
				g.names.push_back(expect_identifier());
			} while (accept(","));
			expect(";");
			items.push_back(ModuleItem{std::move(g)});
			return;
		}
		if (t.is("generate")) {
			take();
			while (!cur().is("endgenerate")) {
				if (at_end())
					throw SyntaxError(cur().loc, "missing 'endgenerate'");
				parse_module_item(m, items, true);
			}
			take();
			return;
		}
		if (t.is("for")) {
			items.push_back(ModuleItem{parse_generate_for(m)});
			return;
		}
		if (t.is("if") || t.is("case"))
			throw UnsupportedConstruct("generate " + t.text, t.loc);
		if (t.is("begin")) {
			// Bare generate region block.
			take();
			if (accept(":"))
				expect_identifier();
			while (!accept("end")) {
				if (at_end())
					throw SyntaxError(cur().loc, "missing 'end'");
				parse_module_item(m, items, true);
			}
			return;
		}
		if (is_keyword(t.text))
			throw SyntaxError(t.loc, "unexpected '" + t.text + "' in module body");
		items.push_back(ModuleItem{parse_instance()});
	}

	NetDecl parse_net_decl()
	{
		size_t start = pos_;
		NetDecl decl = parse_decl_head();
		do {
			decl.names.push_back(expect_identifier());
			if (cur().is("["))
				throw UnsupportedConstruct("memory (array) declaration", cur().loc);
			if (accept("=")) {
				if (decl.init)
					throw UnsupportedConstruct("multiple declaration assignments in one statement", decl.loc);
				decl.init = parse_expr();
			}
		} while (accept(","));
		if (decl.init && decl.names.size() != 1)
			throw UnsupportedConstruct("declaration assignment with multiple names", decl.loc);
		expect(";");
		if (decl.direction == PortDirection::Input)
			for (size_t i = start; i < pos_; ++i)
				decl.high = decl.high || tokens_[i].high_comment;
		return decl;
	}

	std::vector<ParamDecl> parse_param_assignments(bool local)
	{
		std::vector<ParamDecl> out;
		std::optional<Range> range;
		if (cur().is("signed"))
			throw UnsupportedConstruct("signed parameter", cur().loc);
		if (cur().is("integer"))
			take();
		if (cur().is("["))
			range = parse_range();
		do {
			ParamDecl p;
			p.loc = cur().loc;
			p.local = local;
			p.range = range;
			p.name = expect_identifier();
			expect("=");
			p.value = parse_expr();
			out.push_back(std::move(p));
		} while (cur().is(",") && peek_tok().kind == TokenKind::Identifier && !peek_tok().is("parameter") &&
			 peek_tok(2).is("=") && (take(), true));
		return out;
	}

	AlwaysBlock parse_always()
	{
		AlwaysBlock a;
		a.loc = expect("always").loc;
		expect("@");
		if (accept("*")) {
			// combinational
		} else {
			expect("(");
			if (accept("*")) {
				expect(")");
			} else {
				bool level = false;
				do {
					if (cur().is("posedge") || cur().is("negedge")) {
						bool pos = take().text == "posedge";
						a.edges.push_back(EdgeEvent{pos, expect_identifier()});
					} else {
						parse_expr();
						level = true;
					}
				} while (accept("or") || accept(","));
				expect(")");
				if (level && !a.edges.empty())
					throw UnsupportedConstruct("mixed edge and level sensitivity", a.loc);
			}
		}
		a.body = parse_stmt();
		return a;
	}

	GenerateFor parse_generate_for(Module &m)
	{
		GenerateFor g;
		g.loc = expect("for").loc;
		expect("(");
		g.genvar = expect_identifier();
		expect("=");
		g.init = parse_expr();
		expect(";");
		g.cond = parse_expr();
		expect(";");
		std::string step_var = expect_identifier();
		if (step_var != g.genvar)
			throw SyntaxError(g.loc, "generate loop must step its own genvar");
		expect("=");
		g.step = parse_expr();
		expect(")");
		if (accept("begin")) {
			if (accept(":"))
				g.label = expect_identifier();
			while (!accept("end")) {
				if (at_end())
					throw SyntaxError(cur().loc, "missing 'end' in generate loop");
				parse_module_item(m, g.items, true);
			}
		} else {
			parse_module_item(m, g.items, true);
		}
		return g;
	}

	Instance parse_instance()
	{
		Instance inst;
		inst.loc = cur().loc;
		inst.module = expect_identifier();
		if (accept("#")) {
			expect("(");
			inst.parameters = parse_connections();
			expect(")");
		}
		inst.name = expect_identifier();
		if (cur().is("["))
			throw UnsupportedConstruct("instance array", cur().loc);
		expect("(");
		inst.connections = parse_connections();
		expect(")");
		if (cur().is(","))
			throw UnsupportedConstruct("multiple instances in one statement", cur().loc);
		expect(";");
		return inst;
	}

	std::vector<Connection> parse_connections()
	{
		std::vector<Connection> out;
		if (cur().is(")"))
			return out;
		do {
			Connection c;
			if (accept(".")) {
				c.port = expect_identifier();
				expect("(");
				if (!cur().is(")"))
					c.expr = parse_expr();
				expect(")");
			} else {
				c.expr = parse_expr();
			}
			out.push_back(std::move(c));
		} while (accept(","));
		return out;
	}

	// ---- statements ----
	StmtPtr parse_stmt()
	{
		auto s = std::make_shared<Stmt>();
		s->loc = cur().loc;
		if (cur().kind == TokenKind::AttributeOpen)
			parse_attributes();
		if (accept("begin")) {
			s->kind = StmtKind::Block;
			if (accept(":"))
				expect_identifier();
			while (!accept("end")) {
				if (at_end())
					throw SyntaxError(cur().loc, "missing 'end'");
				s->body.push_back(parse_stmt());
			}
			return s;
		}
		if (accept(";")) {
			s->kind = StmtKind::Block;
			return s;
		}
		if (accept("if")) {
			s->kind = StmtKind::If;
			expect("(");
			s->cond = parse_expr();
			expect(")");
			s->then_branch = parse_stmt();
			if (accept("else"))
				s->else_branch = parse_stmt();
			return s;
		}
		if (cur().is("casex") || cur().is("casez"))
			throw UnsupportedConstruct(cur().text, cur().loc);
		if (accept("case")) {
			s->kind = StmtKind::Case;
			expect("(");
			s->cond = parse_expr();
			expect(")");
			while (!accept("endcase")) {
				if (at_end())
					throw SyntaxError(cur().loc, "missing 'endcase'");
				CaseItem item;
				if (accept("default")) {
					accept(":");
				} else {
					do {
						item.labels.push_back(parse_expr());
					} while (accept(","));
					expect(":");
				}
				item.body = parse_stmt();
				s->items.push_back(std::move(item));
			}
			return s;
		}
		if (cur().is("for") || cur().is("while") || cur().is("repeat") || cur().is("forever") || cur().is("#") ||
		    cur().is("wait") || cur().is("disable") || cur().is("fork") || cur().is("assign") || cur().is("force"))
			throw UnsupportedConstruct(cur().text + " statement", cur().loc);
		s->lhs = parse_lvalue();
		if (accept("<="))
			s->kind = StmtKind::NonBlocking;
		else if (accept("="))
			s->kind = StmtKind::Blocking;
		else
			throw SyntaxError(cur().loc, "expected '=' or '<=' in assignment");
		if (cur().is("#"))
			throw UnsupportedConstruct("intra-assignment delay", cur().loc);
		s->rhs = parse_expr();
		expect(";");
		return s;
	}

	ExprPtr parse_lvalue()
	{
		if (cur().is("{")) {
			auto e = std::make_shared<Expr>();
			e->kind = ExprKind::Concat;
			e->loc = take().loc;
			do {
				e->operands.push_back(parse_lvalue());
			} while (accept(","));
			expect("}");
			return e;
		}
		return parse_signal_ref();
	}

	// ---- expressions ----
	ExprPtr parse_expr()
	{
		ExprPtr cond = parse_binary(0);
		if (cur().is("?")) {
			Location loc = take().loc;
			ExprPtr a = parse_expr();
			expect(":");
			ExprPtr b = parse_expr();
			auto e = std::make_shared<Expr>();
			e->kind = ExprKind::Ternary;
			e->loc = loc;
			e->operands = {cond, a, b};
			return e;
		}
		return cond;
	}

	static int precedence(const Token &t)
	{
		if (t.kind != TokenKind::Symbol)
			return -1;
		const std::string &s = t.text;
		if (s == "||")
			return 1;
		if (s == "&&")
			return 2;
		if (s == "|")
			return 3;
		if (s == "^" || s == "~^" || s == "^~")
			return 4;
		if (s == "&")
			return 5;
		if (s == "==" || s == "!=" || s == "===" || s == "!==")
			return 6;
		if (s == "<" || s == "<=" || s == ">" || s == ">=")
			return 7;
		if (s == "<<" || s == ">>" || s == "<<<" || s == ">>>")
			return 8;
		if (s == "+" || s == "-")
			return 9;
		if (s == "*" || s == "/" || s == "%")
			return 10;
		if (s == "**")
			return 11;
		return -1;
	}

	ExprPtr parse_binary(int min_prec)
	{
		ExprPtr lhs = parse_unary();
		while (true) {
			int prec = precedence(cur());
			if (prec < 0 || prec < min_prec)
				break;
			const Token &op = take();
			ExprPtr rhs = parse_binary(prec + 1);
			auto e = std::make_shared<Expr>();
			e->kind = ExprKind::Binary;
			e->loc = op.loc;
			e->op = op.text;
			e->operands = {lhs, rhs};
			lhs = e;
		}
		return lhs;
	}

	ExprPtr parse_unary()
	{
		static const std::set<std::string> unary_ops = {"+", "-", "!", "~", "&", "~&", "|", "~|", "^", "~^", "^~"};
		if (cur().kind == TokenKind::Symbol && unary_ops.count(cur().text)) {
			const Token &op = take();
			auto e = std::make_shared<Expr>();
			e->kind = ExprKind::Unary;
			e->loc = op.loc;
			e->op = op.text;
			e->operands = {parse_unary()};
			return e;
		}
		return parse_primary();
	}

	ExprPtr parse_primary()
	{
		const Token &t = cur();
		if (t.kind == TokenKind::Number) {
			auto e = std::make_shared<Expr>();
			e->kind = ExprKind::Number;
			e->loc = t.loc;
			e->literal = parse_number(t.text, t.loc);
			take();
			return e;
		}
		if (accept("(")) {
			ExprPtr inner = parse_expr();
			expect(")");
			return inner;
		}
		if (t.is("{")) {
			Location loc = take().loc;
			ExprPtr first = parse_expr();
			if (cur().is("{")) {
				// replication {n{...}}
				take();
				auto e = std::make_shared<Expr>();
				e->kind = ExprKind::Replicate;
				e->loc = loc;
				e->operands.push_back(first);
				auto inner = std::make_shared<Expr>();
				inner->kind = ExprKind::Concat;
				inner->loc = loc;
				do {
					inner->operands.push_back(parse_expr());
				} while (accept(","));
				expect("}");
				expect("}");
				e->operands.push_back(inner);
				return e;
			}
			auto e = std::make_shared<Expr>();
			e->kind = ExprKind::Concat;
			e->loc = loc;
			e->operands.push_back(first);
			while (accept(","))
				e->operands.push_back(parse_expr());
			expect("}");
			return e;
		}
		if (t.kind == TokenKind::Identifier) {
			if (peek_tok().is("("))
				throw UnsupportedConstruct("function call", t.loc);
			return parse_signal_ref();
		}
		throw SyntaxError(t.loc, "unexpected '" + describe(t) + "' in expression");
	}

	ExprPtr parse_signal_ref()
	{
		auto e = std::make_shared<Expr>();
		e->loc = cur().loc;
		e->name = expect_identifier();
		if (cur().is("."))
			throw UnsupportedConstruct("hierarchical reference", cur().loc);
		if (!accept("[")) {
			e->kind = ExprKind::Identifier;
			return e;
		}
		ExprPtr first = parse_expr();
		if (accept(":")) {
			e->kind = ExprKind::PartSelect;
			e->operands = {first, parse_expr()};
		} else if (cur().is("+:") || cur().is("-:")) {
			e->kind = ExprKind::IndexedPartSelect;
			e->ascending = take().text == "+:";
			e->operands = {first, parse_expr()};
		} else {
			e->kind = ExprKind::BitSelect;
			e->operands = {first};
		}
		expect("]");
		if (cur().is("["))
			throw UnsupportedConstruct("multi-dimensional select", cur().loc);
		return e;
	}

	const SourceFile &file_;
	std::vector<Token> tokens_;
	size_t pos_ = 0;
};

} // namespace

Ast parse(const SourceUnit &source)
{
	if (source.files.empty())
		throw Error("no input files");
	Ast ast;
	for (const SourceFile &file : source.files) {
		Parser parser(file, lex(file.path, file.text));
		parser.parse_into(ast);
	}
	std::set<std::string> names;
	for (const Module &m : ast.modules)
		if (!names.insert(m.name).second)
			throw SyntaxError(m.loc, "duplicate module '" + m.name + "'");
	return ast;
}

} // namespace qflow::frontend
