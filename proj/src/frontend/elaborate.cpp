/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/frontend/elaborate.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace qflow::frontend {

std::optional<int> Net::offset_of(long long index) const
{
	long long off = msb >= lsb ? index - lsb : lsb - index;
	if (off < 0 || off >= width)
		return std::nullopt;
	return static_cast<int>(off);
}

int Net::index_of(int offset) const { return msb >= lsb ? lsb + offset : lsb - offset; }

int Lvalue::width() const
{
	int w = 0;
	for (const LhsSegment &s : segments)
		w += s.width;
	return w;
}

std::optional<int> ElaboratedDesign::find_net(const std::string &name) const
{
	for (size_t i = 0; i < nets.size(); ++i)
		if (nets[i].name == name)
			return static_cast<int>(i);
	return std::nullopt;
}

std::string ElaboratedDesign::bit_name(const BitRef &bit) const
{
	const Net &n = nets.at(bit.net);
	if (n.width == 1)
		return n.name;
	return n.name + "[" + std::to_string(n.index_of(bit.bit)) + "]";
}

namespace {

void collect_assignments(const RStmtPtr &s, const Process &p, std::vector<Assignment> &out)
{
	if (!s)
		return;
	switch (s->kind) {
	case RStmtKind::Block:
		for (const RStmtPtr &c : s->body)
			collect_assignments(c, p, out);
		break;
	case RStmtKind::Assign:
		out.push_back(Assignment{s->lhs, s->rhs, p.kind == ProcessKind::Sequential, p.clock_net, p.posedge});
		break;
	case RStmtKind::If:
		collect_assignments(s->then_branch, p, out);
		collect_assignments(s->else_branch, p, out);
		break;
	case RStmtKind::Case:
		for (const RCaseItem &item : s->items)
			collect_assignments(item.body, p, out);
		break;
	}
}

} // namespace

std::vector<Assignment> ElaboratedDesign::assignments() const
{
	std::vector<Assignment> out;
	for (const Process &p : processes)
		collect_assignments(p.body, p, out);
	return out;
}

namespace {

constexpr long long kMaxGenerateIterations = 1 << 20;

struct NotConstant
{
	Location loc;
};

RExprPtr make_const(std::vector<bool> bits, const Location &loc)
{
	auto e = std::make_shared<RExpr>();
	e->kind = RKind::Const;
	e->width = static_cast<int>(bits.size());
	e->bits = std::move(bits);
	e->loc = loc;
	return e;
}

RExprPtr make_const_value(long long v, int width, const Location &loc)
{
	std::vector<bool> bits(width);
	for (int i = 0; i < width && i < 64; ++i)
		bits[i] = (static_cast<unsigned long long>(v) >> i) & 1;
	return make_const(std::move(bits), loc);
}

RExprPtr make_slice(int net, int offset, int width, const Location &loc)
{
	auto e = std::make_shared<RExpr>();
	e->kind = RKind::Net;
	e->net = net;
	e->offset = offset;
	e->width = width;
	e->loc = loc;
	return e;
}

long long literal_value(const std::vector<bool> &bits)
{
	unsigned long long v = 0;
	for (int i = std::min<int>(static_cast<int>(bits.size()), 64) - 1; i >= 0; --i)
		v = (v << 1) | (bits[i] ? 1 : 0);
	return static_cast<long long>(v);
}

// Integer evaluation for parameters, ranges and generate bounds.
long long const_value(const RExpr &e)
{
	auto arg = [&](size_t i) { return const_value(*e.args[i]); };
	switch (e.kind) {
	case RKind::Const:
		return literal_value(e.bits);
	case RKind::Net:
	case RKind::DynSelect:
		throw NotConstant{e.loc};
	case RKind::Unary: {
		long long a = arg(0);
		unsigned long long mask = e.args[0]->width >= 64 ? ~0ull : ((1ull << e.args[0]->width) - 1);
		unsigned long long ua = static_cast<unsigned long long>(a) & mask;
		int pop = __builtin_popcountll(ua);
		switch (e.unary) {
		case UnaryOp::BitNot:
			return static_cast<long long>(~ua & mask);
		case UnaryOp::LogicNot:
			return a == 0;
		case UnaryOp::Negate:
			return -a;
		case UnaryOp::RedAnd:
			return ua == mask;
		case UnaryOp::RedOr:
			return ua != 0;
		case UnaryOp::RedXor:
			return pop & 1;
		case UnaryOp::RedNand:
			return ua != mask;
		case UnaryOp::RedNor:
			return ua == 0;
		case UnaryOp::RedXnor:
			return !(pop & 1);
		}
		break;
	}
	case RKind::Binary: {
		long long a = arg(0), b = arg(1);
		switch (e.binary) {
		case BinaryOp::And:
			return a & b;
		case BinaryOp::Or:
			return a | b;
		case BinaryOp::Xor:
			return a ^ b;
		case BinaryOp::Xnor:
			return ~(a ^ b);
		case BinaryOp::Add:
			return a + b;
		case BinaryOp::Sub:
			return a - b;
		case BinaryOp::Shl:
			return b >= 64 ? 0 : a << b;
		case BinaryOp::Shr:
			return b >= 64 ? 0 : static_cast<long long>(static_cast<unsigned long long>(a) >> b);
		case BinaryOp::Eq:
			return a == b;
		case BinaryOp::Ne:
			return a != b;
		case BinaryOp::Lt:
			return a < b;
		case BinaryOp::Le:
			return a <= b;
		case BinaryOp::Gt:
			return a > b;
		case BinaryOp::Ge:
			return a >= b;
		case BinaryOp::LogicAnd:
			return a && b;
		case BinaryOp::LogicOr:
			return a || b;
		}
		break;
	}
	case RKind::Ternary:
		return arg(0) ? arg(1) : arg(2);
	case RKind::Concat: {
		long long v = 0;
		for (const RExprPtr &a : e.args)
			v = (v << a->width) | const_value(*a);
		return v;
	}
	}
	throw NotConstant{e.loc};
}

bool is_const(const RExpr &e)
{
	if (e.kind == RKind::Net || e.kind == RKind::DynSelect)
		return false;
	return std::all_of(e.args.begin(), e.args.end(), [](const RExprPtr &a) { return is_const(*a); });
}

struct Scope
{
	const Scope *parent = nullptr;
	std::map<std::string, std::vector<bool>> consts;
	std::map<std::string, int> nets;
	std::string prefix;

	const std::vector<bool> *find_const(const std::string &name) const
	{
		for (const Scope *s = this; s; s = s->parent) {
			if (auto it = s->consts.find(name); it != s->consts.end())
				return &it->second;
			if (s->nets.count(name))
				return nullptr;
		}
		return nullptr;
	}

	std::optional<int> find_net(const std::string &name) const
	{
		for (const Scope *s = this; s; s = s->parent) {
			if (auto it = s->nets.find(name); it != s->nets.end())
				return it->second;
			if (s->consts.count(name))
				return std::nullopt;
		}
		return std::nullopt;
	}
};

class Elaborator
{
      public:
	Elaborator(const Ast &ast, const SecurityLabelMap &labels) : ast_(ast), labels_(labels) {}

	ElaboratedDesign run(const std::string &top)
	{
		const Module *m = ast_.find(top);
		if (!m)
			throw Error("top module '" + top + "' is not declared");
		design_.top = top;
		std::vector<std::string> stack;
		instantiate(*m, "", {}, stack, true);
		check_drivers();
		project_labels();
		check_clocks();
		return std::move(design_);
	}

      private:
	struct PendingItem
	{
		const ModuleItem *item;
		const Scope *scope;
	};

	// ---- instances ----
	std::map<std::string, int> instantiate(const Module &m, const std::string &prefix,
					       const std::map<std::string, std::vector<bool>> &overrides,
					       std::vector<std::string> &stack, bool is_top)
	{
		if (std::find(stack.begin(), stack.end(), m.name) != stack.end()) {
			std::vector<std::string> cycle(std::find(stack.begin(), stack.end(), m.name), stack.end());
			cycle.push_back(m.name);
			throw RecursiveInstantiation(cycle);
		}
		stack.push_back(m.name);

		Scope &root = scopes_.emplace_back();
		root.prefix = prefix;
		for (const ParamDecl &p : m.header_params)
			define_param(p, root, overrides);

		std::vector<PendingItem> pending;
		int generate_ordinal = 0;
		expand(m, m.items, root, pending, generate_ordinal, is_top);

		std::map<std::string, int> ports;
		for (const std::string &port : m.ports) {
			auto net = root.nets.find(port);
			if (net == root.nets.end() ||
			    (design_.nets[net->second].kind != NetKind::Input && design_.nets[net->second].kind != NetKind::Output))
				throw ElaborationError(m.loc, "port '" + port + "' of module '" + m.name + "' has no direction declaration");
			ports[port] = net->second;
		}
		for (const auto &[name, net] : root.nets) {
			NetKind k = design_.nets[net].kind;
			if ((k == NetKind::Input || k == NetKind::Output) && !ports.count(name))
				throw ElaborationError(design_.nets[net].loc, "'" + name + "' is declared as a port but not listed in the port list");
		}

		for (const PendingItem &p : pending)
			lower_item(m, *p.item, *p.scope, stack);
		stack.pop_back();
		return ports;
	}

	void define_param(const ParamDecl &p, Scope &scope, const std::map<std::string, std::vector<bool>> &overrides)
	{
		std::vector<bool> bits;
		if (auto it = overrides.find(p.name); it != overrides.end() && !p.local) {
			bits = it->second;
		} else {
			RExprPtr v = resolve(p.value, scope);
			if (!is_const(*v))
				throw ElaborationError(p.loc, "parameter '" + p.name + "' is not constant");
			bits = v->kind == RKind::Const ? v->bits : make_const_value(const_value(*v), std::max(v->width, 32), p.loc)->bits;
		}
		if (p.range) {
			int w = range_width(*p.range, scope);
			long long v = literal_value(bits);
			bits = make_const_value(v, w, p.loc)->bits;
		}
		scope.consts[p.name] = std::move(bits);
	}

	void expand(const Module &m, const std::vector<ModuleItem> &items, Scope &scope, std::vector<PendingItem> &pending,
		    int &generate_ordinal, bool is_top)
	{
		for (const ModuleItem &item : items) {
			if (const auto *p = std::get_if<ParamDecl>(&item.node)) {
				define_param(*p, scope, current_overrides_);
			} else if (std::get_if<GenvarDecl>(&item.node)) {
				continue;
			} else if (const auto *decl = std::get_if<NetDecl>(&item.node)) {
				declare(m, *decl, scope, is_top);
				if (decl->init)
					pending.push_back({&item, &scope});
			} else if (const auto *g = std::get_if<GenerateFor>(&item.node)) {
				++generate_ordinal;
				expand_generate(m, *g, scope, pending, generate_ordinal, is_top);
			} else {
				pending.push_back({&item, &scope});
			}
		}
	}

	void expand_generate(const Module &m, const GenerateFor &g, Scope &scope, std::vector<PendingItem> &pending,
			     int &generate_ordinal, bool is_top)
	{
		auto eval_with = [&](const ExprPtr &e, long long value) {
			Scope tmp;
			tmp.parent = &scope;
			tmp.consts[g.genvar] = make_const_value(value, 32, g.loc)->bits;
			RExprPtr r = resolve(e, tmp);
			try {
				return const_value(*r);
			} catch (const NotConstant &) {
				throw NonConstantGenerateBound(g.loc);
			}
		};
		long long value;
		try {
			value = const_value(*resolve(g.init, scope));
		} catch (const NotConstant &) {
			throw NonConstantGenerateBound(g.loc);
		}
		std::string label = g.label.empty() ? "genblk" + std::to_string(generate_ordinal) : g.label;
		for (long long iter = 0; eval_with(g.cond, value); ++iter) {
			if (iter >= kMaxGenerateIterations)
				throw ElaborationError(g.loc, "generate loop does not terminate");
			Scope &body = scopes_.emplace_back();
			body.parent = &scope;
			body.consts[g.genvar] = make_const_value(value, 32, g.loc)->bits;
			body.prefix = scope.prefix + label + "[" + std::to_string(value) + "].";
			int inner_ordinal = 0;
			expand(m, g.items, body, pending, inner_ordinal, is_top);
			value = eval_with(g.step, value);
		}
	}

	int range_width(const Range &r, const Scope &scope, int *msb = nullptr, int *lsb = nullptr)
	{
		long long hi, lo;
		try {
			hi = const_value(*resolve(r.msb, scope));
			lo = const_value(*resolve(r.lsb, scope));
		} catch (const NotConstant &nc) {
			throw ElaborationError(nc.loc, "range bound is not constant");
		}
		if (msb)
			*msb = static_cast<int>(hi);
		if (lsb)
			*lsb = static_cast<int>(lo);
		return static_cast<int>(std::llabs(hi - lo) + 1);
	}

	void declare(const Module &m, const NetDecl &decl, Scope &scope, bool is_top)
	{
		int msb = 0, lsb = 0, width = 1;
		if (decl.range)
			width = range_width(*decl.range, scope, &msb, &lsb);
		for (const std::string &name : decl.names) {
			auto existing = scope.nets.find(name);
			if (existing != scope.nets.end()) {
				Net &n = design_.nets[existing->second];
				if (decl.range && (n.msb != msb || n.lsb != lsb)) {
					if (n.width != 1 || n.msb != 0)
						throw WidthMismatch(decl.loc, "redeclaration of '" + name + "' with a different range");
					n.msb = msb, n.lsb = lsb, n.width = width;
				}
				if (decl.direction) {
					if (n.kind == NetKind::Input || n.kind == NetKind::Output)
						throw ElaborationError(decl.loc, "duplicate port declaration of '" + name + "'");
					n.kind = *decl.direction == PortDirection::Input ? NetKind::Input : NetKind::Output;
					n.top_port = is_top;
				}
				if (decl.direction == PortDirection::Input)
					net_labels_[existing->second] = labels_.resolve(m.name, name, n.name);
				continue;
			}
			Net n;
			n.name = scope.prefix + name;
			n.width = width;
			n.msb = msb;
			n.lsb = lsb;
			n.loc = decl.loc;
			if (decl.direction)
				n.kind = *decl.direction == PortDirection::Input ? NetKind::Input : NetKind::Output;
			else
				n.kind = decl.type == NetType::Reg ? NetKind::Reg : NetKind::Wire;
			n.top_port = is_top && decl.direction.has_value();
			int id = static_cast<int>(design_.nets.size());
			design_.nets.push_back(n);
			net_labels_.push_back(decl.direction == PortDirection::Input ? labels_.resolve(m.name, name, n.name)
										    : Label::Low);
			scope.nets[name] = id;
		}
	}

	void lower_item(const Module &m, const ModuleItem &item, const Scope &scope, std::vector<std::string> &stack)
	{
		if (const auto *decl = std::get_if<NetDecl>(&item.node)) {
			auto s = std::make_shared<RStmt>();
			s->kind = RStmtKind::Assign;
			s->loc = decl->loc;
			int net = *scope.find_net(decl->names.front());
			s->lhs.segments.push_back(LhsSegment{net, 0, design_.nets[net].width});
			s->rhs = resolve(decl->init, scope);
			add_process(ProcessKind::Continuous, s, decl->loc);
		} else if (const auto *a = std::get_if<ContinuousAssign>(&item.node)) {
			auto s = std::make_shared<RStmt>();
			s->kind = RStmtKind::Assign;
			s->loc = a->loc;
			s->lhs = resolve_lvalue(a->lhs, scope);
			s->rhs = resolve(a->rhs, scope);
			add_process(ProcessKind::Continuous, s, a->loc);
		} else if (const auto *al = std::get_if<AlwaysBlock>(&item.node)) {
			Process p;
			p.loc = al->loc;
			p.body = resolve_stmt(al->body, scope);
			if (al->edges.empty()) {
				p.kind = ProcessKind::Combinational;
			} else {
				p.kind = ProcessKind::Sequential;
				auto clk = scope.find_net(al->edges.front().signal);
				if (!clk)
					throw UnknownSignal(al->edges.front().signal, al->loc.str());
				p.clock_net = *clk;
				p.posedge = al->edges.front().posedge;
			}
			design_.processes.push_back(std::move(p));
		} else if (const auto *inst = std::get_if<Instance>(&item.node)) {
			lower_instance(m, *inst, scope, stack);
		}
	}

	void add_process(ProcessKind kind, RStmtPtr body, const Location &loc)
	{
		Process p;
		p.kind = kind;
		p.body = std::move(body);
		p.loc = loc;
		design_.processes.push_back(std::move(p));
	}

	void lower_instance(const Module &parent, const Instance &inst, const Scope &scope, std::vector<std::string> &stack)
	{
		const Module *child = ast_.find(inst.module);
		if (!child)
			throw ElaborationError(inst.loc, "instance '" + inst.name + "' of undeclared module '" + inst.module + "'");

		std::vector<std::string> param_names;
		for (const ParamDecl &p : child->header_params)
			param_names.push_back(p.name);
		for (const ModuleItem &item : child->items)
			if (const auto *p = std::get_if<ParamDecl>(&item.node); p && !p->local)
				param_names.push_back(p->name);
		std::map<std::string, std::vector<bool>> overrides;
		for (size_t i = 0; i < inst.parameters.size(); ++i) {
			const Connection &c = inst.parameters[i];
			std::string name = c.port.empty() ? (i < param_names.size() ? param_names[i] : "") : c.port;
			if (name.empty() || std::find(param_names.begin(), param_names.end(), name) == param_names.end())
				throw ElaborationError(inst.loc, "unknown parameter override on instance '" + inst.name + "'");
			if (!c.expr)
				continue;
			RExprPtr v = resolve(c.expr, scope);
			if (!is_const(*v))
				throw ElaborationError(inst.loc, "parameter override is not constant");
			overrides[name] = v->kind == RKind::Const ? v->bits : make_const_value(const_value(*v), 32, inst.loc)->bits;
		}

		auto saved = current_overrides_;
		current_overrides_ = overrides;
		std::map<std::string, int> ports = instantiate(*child, scope.prefix + inst.name + ".", overrides, stack, false);
		current_overrides_ = saved;
		(void)parent;

		for (size_t i = 0; i < inst.connections.size(); ++i) {
			const Connection &c = inst.connections[i];
			std::string port;
			if (c.port.empty()) {
				if (i >= child->ports.size())
					throw ElaborationError(inst.loc, "too many connections on instance '" + inst.name + "'");
				port = child->ports[i];
			} else {
				port = c.port;
			}
			auto it = ports.find(port);
			if (it == ports.end())
				throw ElaborationError(inst.loc, "module '" + child->name + "' has no port '" + port + "'");
			if (!c.expr)
				continue;
			const Net &pn = design_.nets[it->second];
			auto s = std::make_shared<RStmt>();
			s->kind = RStmtKind::Assign;
			s->loc = c.expr->loc;
			if (pn.kind == NetKind::Input) {
				s->lhs.segments.push_back(LhsSegment{it->second, 0, pn.width});
				s->rhs = resolve(c.expr, scope);
				if (s->rhs->width != pn.width && s->rhs->kind != RKind::Const)
					throw WidthMismatch(c.expr->loc, "port '" + pn.name + "' is " + std::to_string(pn.width) +
									  " bits, connection is " + std::to_string(s->rhs->width));
			} else {
				s->lhs = resolve_lvalue(c.expr, scope);
				s->rhs = make_slice(it->second, 0, pn.width, c.expr->loc);
				if (s->lhs.width() != pn.width)
					throw WidthMismatch(c.expr->loc, "port '" + pn.name + "' is " + std::to_string(pn.width) +
									  " bits, connection is " + std::to_string(s->lhs.width()));
			}
			add_process(ProcessKind::Continuous, s, inst.loc);
		}
	}

	// ---- expressions ----
	int net_or_throw(const std::string &name, const Scope &scope, const Location &loc)
	{
		auto net = scope.find_net(name);
		if (!net)
			throw UnknownSignal(name, loc.str());
		return *net;
	}

	long long index_value(const ExprPtr &e, const Scope &scope)
	{
		try {
			return const_value(*resolve(e, scope));
		} catch (const NotConstant &) {
			throw UnsupportedConstruct("non-constant part-select bound", e->loc);
		}
	}

	int checked_offset(const Net &n, long long index, const Location &loc)
	{
		auto off = n.offset_of(index);
		if (!off)
			throw WidthMismatch(loc, "index " + std::to_string(index) + " is outside " + n.name + "[" +
						     std::to_string(n.msb) + ":" + std::to_string(n.lsb) + "]");
		return *off;
	}

	RExprPtr resolve(const ExprPtr &e, const Scope &scope)
	{
		switch (e->kind) {
		case ExprKind::Number:
			return make_const(e->literal.bits, e->loc);
		case ExprKind::Identifier: {
			if (const auto *c = scope.find_const(e->name))
				return make_const(*c, e->loc);
			int net = net_or_throw(e->name, scope, e->loc);
			return make_slice(net, 0, design_.nets[net].width, e->loc);
		}
		case ExprKind::BitSelect: {
			if (const auto *c = scope.find_const(e->name)) {
				long long idx = index_value(e->operands[0], scope);
				return make_const({idx >= 0 && idx < static_cast<long long>(c->size()) && (*c)[idx]}, e->loc);
			}
			int net = net_or_throw(e->name, scope, e->loc);
			RExprPtr index = resolve(e->operands[0], scope);
			if (is_const(*index))
				return make_slice(net, checked_offset(design_.nets[net], const_value(*index), e->loc), 1, e->loc);
			auto d = std::make_shared<RExpr>();
			d->kind = RKind::DynSelect;
			d->net = net;
			d->width = 1;
			d->args = {index};
			d->loc = e->loc;
			return d;
		}
		case ExprKind::PartSelect:
		case ExprKind::IndexedPartSelect: {
			if (scope.find_const(e->name))
				throw UnsupportedConstruct("part-select of a parameter", e->loc);
			int net = net_or_throw(e->name, scope, e->loc);
			const Net &n = design_.nets[net];
			long long a = index_value(e->operands[0], scope);
			long long b = index_value(e->operands[1], scope);
			long long first, second;
			if (e->kind == ExprKind::PartSelect) {
				first = a, second = b;
			} else {
				if (b <= 0)
					throw WidthMismatch(e->loc, "indexed part-select width must be positive");
				first = a;
				second = e->ascending ? a + b - 1 : a - b + 1;
			}
			int o1 = checked_offset(n, first, e->loc);
			int o2 = checked_offset(n, second, e->loc);
			return make_slice(net, std::min(o1, o2), std::abs(o1 - o2) + 1, e->loc);
		}
		case ExprKind::Unary: {
			RExprPtr a = resolve(e->operands[0], scope);
			if (e->op == "+")
				return a;
			auto r = std::make_shared<RExpr>();
			r->kind = RKind::Unary;
			r->loc = e->loc;
			r->args = {a};
			static const std::map<std::string, UnaryOp> ops = {
			    {"~", UnaryOp::BitNot},   {"!", UnaryOp::LogicNot}, {"-", UnaryOp::Negate},  {"&", UnaryOp::RedAnd},
			    {"|", UnaryOp::RedOr},    {"^", UnaryOp::RedXor},   {"~&", UnaryOp::RedNand}, {"~|", UnaryOp::RedNor},
			    {"~^", UnaryOp::RedXnor}, {"^~", UnaryOp::RedXnor}};
			r->unary = ops.at(e->op);
			r->width = (r->unary == UnaryOp::BitNot || r->unary == UnaryOp::Negate) ? a->width : 1;
			return r;
		}
		case ExprKind::Binary:
			return resolve_binary(*e, scope);
		case ExprKind::Ternary: {
			auto r = std::make_shared<RExpr>();
			r->kind = RKind::Ternary;
			r->loc = e->loc;
			r->args = {resolve(e->operands[0], scope), resolve(e->operands[1], scope), resolve(e->operands[2], scope)};
			r->width = std::max(r->args[1]->width, r->args[2]->width);
			return r;
		}
		case ExprKind::Concat: {
			auto r = std::make_shared<RExpr>();
			r->kind = RKind::Concat;
			r->loc = e->loc;
			r->width = 0;
			for (const ExprPtr &op : e->operands) {
				RExprPtr a = resolve(op, scope);
				if (a->kind == RKind::Const && op->kind == ExprKind::Number && !op->literal.sized)
					throw UnsupportedConstruct("unsized literal in concatenation", op->loc);
				r->width += a->width;
				r->args.push_back(a);
			}
			return r;
		}
		case ExprKind::Replicate: {
			long long count;
			try {
				count = const_value(*resolve(e->operands[0], scope));
			} catch (const NotConstant &) {
				throw UnsupportedConstruct("non-constant replication count", e->loc);
			}
			if (count <= 0)
				throw UnsupportedConstruct("zero or negative replication count", e->loc);
			RExprPtr inner = resolve(e->operands[1], scope);
			auto r = std::make_shared<RExpr>();
			r->kind = RKind::Concat;
			r->loc = e->loc;
			r->width = 0;
			for (long long i = 0; i < count; ++i) {
				r->args.push_back(inner);
				r->width += inner->width;
			}
			return r;
		}
		}
		throw UnsupportedConstruct("expression", e->loc);
	}

	RExprPtr resolve_binary(const Expr &e, const Scope &scope)
	{
		RExprPtr a = resolve(e.operands[0], scope);
		RExprPtr b = resolve(e.operands[1], scope);
		if (e.op == "*" || e.op == "/" || e.op == "%" || e.op == "**") {
			if (!is_const(*a) || !is_const(*b))
				throw UnsupportedConstruct("non-constant '" + e.op + "'", e.loc);
			long long x = const_value(*a), y = const_value(*b), v = 0;
			if ((e.op == "/" || e.op == "%") && y == 0)
				throw ElaborationError(e.loc, "division by zero in constant expression");
			if (e.op == "*")
				v = x * y;
			else if (e.op == "/")
				v = x / y;
			else if (e.op == "%")
				v = x % y;
			else {
				v = 1;
				for (long long i = 0; i < y; ++i)
					v *= x;
			}
			return make_const_value(v, e.op == "**" ? a->width : std::max(a->width, b->width), e.loc);
		}
		static const std::map<std::string, BinaryOp> ops = {
		    {"&", BinaryOp::And},   {"|", BinaryOp::Or},   {"^", BinaryOp::Xor},       {"~^", BinaryOp::Xnor},
		    {"^~", BinaryOp::Xnor}, {"+", BinaryOp::Add},  {"-", BinaryOp::Sub},       {"<<", BinaryOp::Shl},
		    {">>", BinaryOp::Shr},  {"<<<", BinaryOp::Shl}, {">>>", BinaryOp::Shr},    {"==", BinaryOp::Eq},
		    {"!=", BinaryOp::Ne},   {"===", BinaryOp::Eq}, {"!==", BinaryOp::Ne},      {"<", BinaryOp::Lt},
		    {"<=", BinaryOp::Le},   {">", BinaryOp::Gt},   {">=", BinaryOp::Ge},       {"&&", BinaryOp::LogicAnd},
		    {"||", BinaryOp::LogicOr}};
		auto r = std::make_shared<RExpr>();
		r->kind = RKind::Binary;
		r->loc = e.loc;
		r->binary = ops.at(e.op);
		r->args = {a, b};
		switch (r->binary) {
		case BinaryOp::Shl:
		case BinaryOp::Shr:
			r->width = a->width;
			break;
		case BinaryOp::Eq:
		case BinaryOp::Ne:
		case BinaryOp::Lt:
		case BinaryOp::Le:
		case BinaryOp::Gt:
		case BinaryOp::Ge:
		case BinaryOp::LogicAnd:
		case BinaryOp::LogicOr:
			r->width = 1;
			break;
		default:
			r->width = std::max(a->width, b->width);
		}
		return r;
	}

	Lvalue resolve_lvalue(const ExprPtr &e, const Scope &scope)
	{
		Lvalue lv;
		append_lvalue(e, scope, lv);
		return lv;
	}

	void append_lvalue(const ExprPtr &e, const Scope &scope, Lvalue &lv)
	{
		switch (e->kind) {
		case ExprKind::Concat:
			for (const ExprPtr &op : e->operands)
				append_lvalue(op, scope, lv);
			return;
		case ExprKind::Identifier:
		case ExprKind::BitSelect:
		case ExprKind::PartSelect:
		case ExprKind::IndexedPartSelect: {
			if (scope.find_const(e->name))
				throw ElaborationError(e->loc, "assignment to parameter or genvar '" + e->name + "'");
			RExprPtr r = resolve(e, scope);
			if (r->kind == RKind::DynSelect)
				throw UnsupportedConstruct("variable index on an assignment target", e->loc);
			lv.segments.push_back(LhsSegment{r->net, r->offset, r->width});
			return;
		}
		default:
			throw SyntaxError(e->loc, "invalid assignment target");
		}
	}

	RStmtPtr resolve_stmt(const StmtPtr &s, const Scope &scope)
	{
		auto r = std::make_shared<RStmt>();
		r->loc = s->loc;
		switch (s->kind) {
		case StmtKind::Block:
			r->kind = RStmtKind::Block;
			for (const StmtPtr &c : s->body)
				r->body.push_back(resolve_stmt(c, scope));
			break;
		case StmtKind::Blocking:
		case StmtKind::NonBlocking:
			r->kind = RStmtKind::Assign;
			r->nonblocking = s->kind == StmtKind::NonBlocking;
			r->lhs = resolve_lvalue(s->lhs, scope);
			r->rhs = resolve(s->rhs, scope);
			break;
		case StmtKind::If:
			r->kind = RStmtKind::If;
			r->cond = resolve(s->cond, scope);
			r->then_branch = resolve_stmt(s->then_branch, scope);
			if (s->else_branch)
				r->else_branch = resolve_stmt(s->else_branch, scope);
			break;
		case StmtKind::Case:
			r->kind = RStmtKind::Case;
			r->cond = resolve(s->cond, scope);
			for (const CaseItem &item : s->items) {
				RCaseItem ri;
				for (const ExprPtr &l : item.labels)
					ri.labels.push_back(resolve(l, scope));
				ri.body = resolve_stmt(item.body, scope);
				r->items.push_back(std::move(ri));
			}
			break;
		}
		return r;
	}

	// ---- whole-design checks ----
	static void collect_targets(const RStmtPtr &s, std::vector<LhsSegment> &out)
	{
		if (!s)
			return;
		switch (s->kind) {
		case RStmtKind::Block:
			for (const RStmtPtr &c : s->body)
				collect_targets(c, out);
			break;
		case RStmtKind::Assign:
			out.insert(out.end(), s->lhs.segments.begin(), s->lhs.segments.end());
			break;
		case RStmtKind::If:
			collect_targets(s->then_branch, out);
			collect_targets(s->else_branch, out);
			break;
		case RStmtKind::Case:
			for (const RCaseItem &i : s->items)
				collect_targets(i.body, out);
			break;
		}
	}

	void check_drivers()
	{
		for (size_t p = 0; p < design_.processes.size(); ++p) {
			std::vector<LhsSegment> targets;
			collect_targets(design_.processes[p].body, targets);
			for (const LhsSegment &seg : targets) {
				const Net &n = design_.nets[seg.net];
				if (n.kind == NetKind::Input && n.top_port)
					throw ElaborationError(design_.processes[p].loc, "top-level input '" + n.name + "' is driven");
				for (int b = 0; b < seg.width; ++b) {
					BitRef bit{seg.net, seg.offset + b};
					auto [it, inserted] = driver_.emplace(bit, static_cast<int>(p));
					if (!inserted && it->second != static_cast<int>(p))
						throw ElaborationError(design_.processes[p].loc,
								       "multiple drivers for " + design_.bit_name(bit));
				}
			}
		}
	}

	// Bit `pos` of a resolved expression when it is a plain wire copy.
	static std::optional<BitRef> copy_bit(const RExpr &e, int pos)
	{
		if (pos < 0 || pos >= e.width)
			return std::nullopt;
		if (e.kind == RKind::Net)
			return BitRef{e.net, e.offset + pos};
		if (e.kind == RKind::Concat) {
			for (auto it = e.args.rbegin(); it != e.args.rend(); ++it) {
				if (pos < (*it)->width)
					return copy_bit(**it, pos);
				pos -= (*it)->width;
			}
		}
		return std::nullopt;
	}

	// Follow continuous copy assignments upstream as far as they go.
	BitRef trace_copies(BitRef bit) const
	{
		for (size_t guard = 0; guard <= design_.nets.size(); ++guard) {
			auto d = driver_.find(bit);
			if (d == driver_.end())
				return bit;
			const Process &p = design_.processes[d->second];
			if (p.kind != ProcessKind::Continuous || p.body->kind != RStmtKind::Assign)
				return bit;
			int pos = 0;
			bool found = false;
			for (auto it = p.body->lhs.segments.rbegin(); it != p.body->lhs.segments.rend(); ++it) {
				if (it->net == bit.net && bit.bit >= it->offset && bit.bit < it->offset + it->width) {
					pos += bit.bit - it->offset;
					found = true;
					break;
				}
				pos += it->width;
			}
			auto src = found ? copy_bit(*p.body->rhs, pos) : std::nullopt;
			if (!src)
				return bit;
			bit = *src;
		}
		return bit;
	}

	void project_labels()
	{
		for (size_t net = 0; net < design_.nets.size(); ++net) {
			if (net_labels_[net] != Label::High)
				continue;
			const Net &n = design_.nets[net];
			design_.declared_high_width += n.width;
			for (int b = 0; b < n.width; ++b) {
				BitRef root = trace_copies(BitRef{static_cast<int>(net), b});
				const Net &rn = design_.nets[root.net];
				if (!(rn.kind == NetKind::Input && rn.top_port))
					throw LabelOnNonInput(n.name);
				design_.high_bits.insert(root);
			}
		}
	}

	void check_clocks()
	{
		std::optional<BitRef> clock;
		for (const Process &p : design_.processes) {
			if (p.kind != ProcessKind::Sequential)
				continue;
			BitRef root = trace_copies(BitRef{p.clock_net, 0});
			if (clock && *clock != root)
				throw UnsupportedConstruct("multiple clock domains (" + design_.bit_name(*clock) + ", " +
							       design_.bit_name(root) + ")",
							   p.loc);
			clock = root;
		}
	}

	const Ast &ast_;
	const SecurityLabelMap &labels_;
	ElaboratedDesign design_;
	std::deque<Scope> scopes_;
	std::vector<Label> net_labels_;
	std::map<std::string, std::vector<bool>> current_overrides_;
	std::map<BitRef, int> driver_;
};

} // namespace

ElaboratedDesign elaborate(const Ast &ast, const std::string &top, const SecurityLabelMap &labels)
{
	return Elaborator(ast, labels).run(top);
}

} // namespace qflow::frontend
