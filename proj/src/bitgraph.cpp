/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/bitgraph.hpp"

#include "qflow/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace qflow {

using frontend::ElaboratedDesign;
using frontend::NetKind;
using frontend::ProcessKind;
using frontend::RExpr;
using frontend::RKind;
using frontend::RStmt;
using frontend::RStmtKind;

const char *macro_name(MacroKind kind)
{
	switch (kind) {
	case MacroKind::Add:
		return "ADD";
	case MacroKind::Sub:
		return "SUB";
	case MacroKind::Eq:
		return "EQ";
	case MacroKind::Ne:
		return "NE";
	case MacroKind::Lt:
		return "LT";
	case MacroKind::Le:
		return "LE";
	}
	return "?";
}

bool macro_eval(MacroKind kind, const std::vector<bool> &a, const std::vector<bool> &b)
{
	std::size_t w = a.size();
	if (kind == MacroKind::Add || kind == MacroKind::Sub) {
		bool carry = kind == MacroKind::Sub;
		bool out = false;
		for (std::size_t k = 0; k < w; ++k) {
			bool y = kind == MacroKind::Sub ? !b[k] : b[k];
			out = a[k] ^ y ^ carry;
			carry = (a[k] && y) || (carry && (a[k] ^ y));
		}
		return out;
	}
	// Unsigned compare from the MSB down.
	int cmp = 0;
	for (std::size_t k = w; k-- > 0;) {
		if (a[k] != b[k]) {
			cmp = a[k] ? 1 : -1;
			break;
		}
	}
	switch (kind) {
	case MacroKind::Eq:
		return cmp == 0;
	case MacroKind::Ne:
		return cmp != 0;
	case MacroKind::Lt:
		return cmp < 0;
	case MacroKind::Le:
		return cmp <= 0;
	default:
		return false;
	}
}

// ---- Forest ----

std::size_t Forest::NodeHash::operator()(const Node &n) const noexcept
{
	std::size_t h = static_cast<std::size_t>(n.op) * 31 + static_cast<std::size_t>(n.macro);
	h = h * 1000003 ^ BitRefHash()(n.leaf);
	for (NodeId k : n.kids)
		h = h * 1000003 ^ static_cast<std::size_t>(k);
	return h;
}

NodeId Forest::intern(Node n)
{
	auto it = interned_.find(n);
	if (it != interned_.end())
		return it->second;
	NodeId id = static_cast<NodeId>(nodes_.size());
	nodes_.push_back(n);
	interned_.emplace(std::move(n), id);
	return id;
}

NodeId Forest::constant(bool value)
{
	Node n;
	n.op = value ? Op::Const1 : Op::Const0;
	return intern(std::move(n));
}

NodeId Forest::leaf(const BitRef &bit)
{
	Node n;
	n.op = Op::Leaf;
	n.leaf = bit;
	return intern(std::move(n));
}

NodeId Forest::fold(Op op, const std::vector<NodeId> &kids)
{
	auto is0 = [&](NodeId k) { return nodes_[k].op == Op::Const0; };
	auto is1 = [&](NodeId k) { return nodes_[k].op == Op::Const1; };
	bool all_const = std::all_of(kids.begin(), kids.end(), [&](NodeId k) { return nodes_[k].is_const(); });
	if (all_const) {
		switch (op) {
		case Op::Not:
			return constant(is0(kids[0]));
		case Op::And:
			return constant(is1(kids[0]) && is1(kids[1]));
		case Op::Or:
			return constant(is1(kids[0]) || is1(kids[1]));
		case Op::Xor:
			return constant(is1(kids[0]) != is1(kids[1]));
		case Op::Mux:
			return is1(kids[0]) ? kids[1] : kids[2];
		default:
			break;
		}
	}
	if (!fold_)
		return -1;
	switch (op) {
	case Op::Not:
		if (nodes_[kids[0]].op == Op::Not)
			return nodes_[kids[0]].kids[0];
		break;
	case Op::And:
		for (int i = 0; i < 2; ++i) {
			if (is0(kids[i]))
				return constant(false);
			if (is1(kids[i]))
				return kids[1 - i];
		}
		break;
	case Op::Or:
		for (int i = 0; i < 2; ++i) {
			if (is1(kids[i]))
				return constant(true);
			if (is0(kids[i]))
				return kids[1 - i];
		}
		break;
	case Op::Xor:
		for (int i = 0; i < 2; ++i) {
			if (is0(kids[i]))
				return kids[1 - i];
			if (is1(kids[i]))
				return make(Op::Not, {kids[1 - i]});
		}
		break;
	case Op::Mux:
		if (nodes_[kids[0]].is_const())
			return is1(kids[0]) ? kids[1] : kids[2];
		if (kids[1] == kids[2])
			return kids[1];
		break;
	default:
		break;
	}
	return -1;
}

NodeId Forest::make(Op op, std::vector<NodeId> kids)
{
	NodeId folded = fold(op, kids);
	if (folded >= 0)
		return folded;
	Node n;
	n.op = op;
	n.kids = std::move(kids);
	return intern(std::move(n));
}

NodeId Forest::macro(MacroKind kind, const std::vector<NodeId> &a, const std::vector<NodeId> &b)
{
	bool all_const = true;
	for (NodeId k : a)
		all_const = all_const && nodes_[k].is_const();
	for (NodeId k : b)
		all_const = all_const && nodes_[k].is_const();
	if (all_const) {
		std::vector<bool> va, vb;
		for (NodeId k : a)
			va.push_back(nodes_[k].op == Op::Const1);
		for (NodeId k : b)
			vb.push_back(nodes_[k].op == Op::Const1);
		return constant(macro_eval(kind, va, vb));
	}
	Node n;
	n.op = Op::Macro;
	n.macro = kind;
	n.kids = a;
	n.kids.insert(n.kids.end(), b.begin(), b.end());
	return intern(std::move(n));
}

bool Forest::eval(NodeId root, const std::function<bool(const BitRef &)> &leaf_value) const
{
	std::unordered_map<NodeId, bool> memo;
	std::function<bool(NodeId)> go = [&](NodeId id) -> bool {
		if (auto it = memo.find(id); it != memo.end())
			return it->second;
		const Node &n = nodes_[id];
		bool v = false;
		switch (n.op) {
		case Op::Const0:
			v = false;
			break;
		case Op::Const1:
			v = true;
			break;
		case Op::Leaf:
			v = leaf_value(n.leaf);
			break;
		case Op::Not:
			v = !go(n.kids[0]);
			break;
		case Op::And:
			v = go(n.kids[0]) && go(n.kids[1]);
			break;
		case Op::Or:
			v = go(n.kids[0]) || go(n.kids[1]);
			break;
		case Op::Xor:
			v = go(n.kids[0]) != go(n.kids[1]);
			break;
		case Op::Mux:
			v = go(n.kids[0]) ? go(n.kids[1]) : go(n.kids[2]);
			break;
		case Op::Macro: {
			std::vector<bool> a, b;
			int w = n.macro_width();
			for (int i = 0; i < w; ++i) {
				a.push_back(go(n.kids[i]));
				b.push_back(go(n.kids[w + i]));
			}
			v = macro_eval(n.macro, a, b);
			break;
		}
		}
		memo[id] = v;
		return v;
	};
	return go(root);
}

int Forest::secret_id(const BitRef &bit) const
{
	auto it = secret_index_.find(bit);
	return it == secret_index_.end() ? -1 : it->second;
}

BitRole Forest::role(const BitRef &bit) const
{
	if (secret_id(bit) >= 0)
		return BitRole::InputHigh;
	const frontend::Net &n = nets.at(bit.net);
	if (n.kind == NetKind::Input && n.top_port)
		return BitRole::InputLow;
	if (registers.count(bit))
		return BitRole::Register;
	if (n.kind == NetKind::Output && n.top_port)
		return BitRole::TopOutput;
	return BitRole::Internal;
}

std::string Forest::bit_name(const BitRef &bit) const
{
	const frontend::Net &n = nets.at(bit.net);
	if (n.width == 1)
		return n.name;
	return n.name + "[" + std::to_string(n.index_of(bit.bit)) + "]";
}

std::optional<std::size_t> Forest::root_of(const BitRef &bit) const
{
	auto it = root_index_.find(bit);
	if (it == root_index_.end())
		return std::nullopt;
	return it->second;
}

void Forest::index_roots()
{
	root_index_.clear();
	for (std::size_t i = 0; i < roots.size(); ++i)
		root_index_[roots[i].bit] = i;
	secret_index_.clear();
	for (std::size_t i = 0; i < high_bits.size(); ++i)
		secret_index_[high_bits[i]] = static_cast<int>(i);
}

std::string Forest::sexpr(NodeId id) const
{
	const Node &n = nodes_[id];
	switch (n.op) {
	case Op::Const0:
		return "0";
	case Op::Const1:
		return "1";
	case Op::Leaf:
		return bit_name(n.leaf);
	default:
		break;
	}
	static const char *names[] = {"0", "1", "LEAF", "NOT", "AND", "OR", "XOR", "MUX", "MACRO"};
	std::string s = "(";
	s += n.op == Op::Macro ? macro_name(n.macro) : names[static_cast<int>(n.op)];
	for (NodeId k : n.kids)
		s += " " + sexpr(k);
	return s + ")";
}

std::string Forest::dump() const
{
	std::string out;
	for (const Root &r : roots)
		out += bit_name(r.bit) + " = " + sexpr(r.node) + "\n";
	return out;
}

// ---- bit blasting ----

namespace {

using Bits = std::vector<NodeId>;

struct Env
{
	std::map<BitRef, NodeId> blocking;
	std::map<BitRef, NodeId> nonblocking;
};

class Blaster
{
      public:
	Blaster(const ElaboratedDesign &design, const BitBlastOptions &options)
	    : d_(design), opt_(options), raw_(options.fold_constants), out_(options.fold_constants)
	{
	}

	Forest run()
	{
		for (const frontend::Process &p : d_.processes)
			execute(p);

		out_.nets = d_.nets;
		out_.high_bits.assign(d_.high_bits.begin(), d_.high_bits.end());
		out_.declared_high_width = d_.declared_high_width;
		out_.registers = registers_;

		std::set<BitRef> root_bits = registers_;
		for (std::size_t net = 0; net < d_.nets.size(); ++net) {
			const frontend::Net &n = d_.nets[net];
			if (n.kind == NetKind::Output && n.top_port)
				for (int b = 0; b < n.width; ++b)
					root_bits.insert(BitRef{static_cast<int>(net), b});
		}
		for (const BitRef &bit : root_bits) {
			Root r;
			r.bit = bit;
			r.is_register = registers_.count(bit) > 0;
			const frontend::Net &n = d_.nets[bit.net];
			r.is_output = n.kind == NetKind::Output && n.top_port;
			if (r.is_register)
				r.node = resolve_raw(driver_.at(bit));
			else
				r.node = resolve_bit(bit);
			out_.roots.push_back(r);
		}
		out_.index_roots();
		return std::move(out_);
	}

      private:
	// ---- gates over the raw store ----
	NodeId g_not(NodeId a) { return raw_.make(Op::Not, {a}); }
	NodeId g_and(NodeId a, NodeId b) { return raw_.make(Op::And, {a, b}); }
	NodeId g_or(NodeId a, NodeId b) { return raw_.make(Op::Or, {a, b}); }
	NodeId g_xor(NodeId a, NodeId b) { return raw_.make(Op::Xor, {a, b}); }
	NodeId g_mux(NodeId s, NodeId a, NodeId b) { return raw_.make(Op::Mux, {s, a, b}); }
	NodeId zero() { return raw_.constant(false); }
	NodeId one() { return raw_.constant(true); }

	NodeId reduce(const Bits &bits, Op op)
	{
		if (bits.empty())
			return op == Op::And ? one() : zero();
		NodeId acc = bits[0];
		for (std::size_t i = 1; i < bits.size(); ++i)
			acc = raw_.make(op, {acc, bits[i]});
		return acc;
	}

	Bits resize(Bits bits, int width)
	{
		bits.resize(width, zero());
		return bits;
	}

	int effective_width(const Bits &a, const Bits &b)
	{
		int eff = 0;
		for (std::size_t k = 0; k < a.size(); ++k)
			if (!raw_.node(a[k]).is_const() || !raw_.node(b[k]).is_const())
				++eff;
		return eff;
	}

	bool use_macro(const Bits &a, const Bits &b) { return effective_width(a, b) > opt_.macro_threshold; }

	Bits add(const Bits &a, const Bits &b, bool subtract)
	{
		int w = static_cast<int>(a.size());
		Bits out(w);
		if (use_macro(a, b)) {
			for (int k = 0; k < w; ++k) {
				Bits ak(a.begin(), a.begin() + k + 1), bk(b.begin(), b.begin() + k + 1);
				out[k] = raw_.macro(subtract ? MacroKind::Sub : MacroKind::Add, ak, bk);
			}
			return out;
		}
		NodeId carry = subtract ? one() : zero();
		for (int k = 0; k < w; ++k) {
			NodeId y = subtract ? g_not(b[k]) : b[k];
			NodeId t = g_xor(a[k], y);
			out[k] = g_xor(t, carry);
			carry = g_or(g_and(a[k], y), g_and(carry, t));
		}
		return out;
	}

	NodeId compare(MacroKind kind, Bits a, Bits b)
	{
		int w = static_cast<int>(std::max(a.size(), b.size()));
		a = resize(std::move(a), w);
		b = resize(std::move(b), w);
		if (use_macro(a, b))
			return raw_.macro(kind, a, b);
		switch (kind) {
		case MacroKind::Eq:
		case MacroKind::Ne: {
			NodeId eq = one();
			for (int k = 0; k < w; ++k) {
				NodeId same = g_not(g_xor(a[k], b[k]));
				eq = k == 0 ? same : g_and(eq, same);
			}
			return kind == MacroKind::Eq ? eq : g_not(eq);
		}
		case MacroKind::Lt:
		case MacroKind::Le: {
			// lt over bits [0, k): a < b
			const Bits &x = kind == MacroKind::Lt ? a : b;
			const Bits &y = kind == MacroKind::Lt ? b : a;
			NodeId lt = zero();
			for (int k = 0; k < w; ++k) {
				NodeId here = g_and(g_not(x[k]), y[k]);
				NodeId same = g_not(g_xor(x[k], y[k]));
				lt = k == 0 ? here : g_or(here, g_and(same, lt));
			}
			return kind == MacroKind::Lt ? lt : g_not(lt);
		}
		default:
			break;
		}
		return zero();
	}

	NodeId equals_const(const Bits &a, long long value)
	{
		Bits b;
		for (std::size_t k = 0; k < a.size(); ++k)
			b.push_back(raw_.constant(k < 64 && ((static_cast<unsigned long long>(value) >> k) & 1)));
		return compare(MacroKind::Eq, a, b);
	}

	Bits shift(const Bits &a, const Bits &amount, bool left)
	{
		int w = static_cast<int>(a.size());
		auto shifted = [&](const Bits &in, long long by) {
			Bits out(w, zero());
			for (int k = 0; k < w; ++k) {
				long long src = left ? k - by : k + by;
				if (src >= 0 && src < w)
					out[k] = in[src];
			}
			return out;
		};
		bool all_const = std::all_of(amount.begin(), amount.end(), [&](NodeId k) { return raw_.node(k).is_const(); });
		if (all_const) {
			long long by = 0;
			for (std::size_t j = 0; j < amount.size(); ++j)
				if (raw_.node(amount[j]).op == Op::Const1) {
					if (j >= 62)
						return Bits(w, zero());
					by |= 1ll << j;
				}
			return shifted(a, by);
		}
		Bits cur = a;
		for (std::size_t j = 0; j < amount.size(); ++j) {
			Bits next = j >= 62 ? Bits(w, zero()) : shifted(cur, 1ll << j);
			for (int k = 0; k < w; ++k)
				cur[k] = g_mux(amount[j], next[k], cur[k]);
		}
		return cur;
	}

	// ---- expressions ----
	NodeId read(const BitRef &bit, const Env &env)
	{
		if (auto it = env.blocking.find(bit); it != env.blocking.end())
			return it->second;
		return raw_.leaf(bit);
	}

	Bits self(const RExpr &e, const Env &env) { return blast(e, e.width, env); }

	NodeId truth(const RExpr &e, const Env &env) { return reduce(self(e, env), Op::Or); }

	/// Value of `e` evaluated at max(ctx, e.width) bits.
	Bits blast(const RExpr &e, int ctx, const Env &env)
	{
		int w = std::max(ctx, e.width);
		switch (e.kind) {
		case RKind::Const: {
			Bits out(w, zero());
			for (int k = 0; k < w && k < static_cast<int>(e.bits.size()); ++k)
				out[k] = raw_.constant(e.bits[k]);
			return out;
		}
		case RKind::Net: {
			Bits out(w, zero());
			for (int k = 0; k < e.width; ++k)
				out[k] = read(BitRef{e.net, e.offset + k}, env);
			return out;
		}
		case RKind::DynSelect: {
			const frontend::Net &n = d_.nets[e.net];
			Bits index = self(*e.args[0], env);
			NodeId acc = zero();
			bool first = true;
			for (int off = 0; off < n.width; ++off) {
				long long idx = n.index_of(off);
				if (idx < 0 || (index.size() < 63 && idx >= (1ll << index.size())))
					continue;
				NodeId term = g_and(equals_const(index, idx), read(BitRef{e.net, off}, env));
				acc = first ? term : g_or(acc, term);
				first = false;
			}
			return resize({acc}, w);
		}
		case RKind::Unary: {
			using frontend::UnaryOp;
			if (e.unary == UnaryOp::BitNot || e.unary == UnaryOp::Negate) {
				Bits a = blast(*e.args[0], w, env);
				for (NodeId &k : a)
					k = g_not(k);
				if (e.unary == UnaryOp::Negate) {
					Bits one_bits(w, zero());
					one_bits[0] = one();
					a = add(a, one_bits, false);
				}
				return a;
			}
			Bits a = self(*e.args[0], env);
			NodeId r = zero();
			switch (e.unary) {
			case UnaryOp::LogicNot:
				r = g_not(reduce(a, Op::Or));
				break;
			case UnaryOp::RedAnd:
				r = reduce(a, Op::And);
				break;
			case UnaryOp::RedOr:
				r = reduce(a, Op::Or);
				break;
			case UnaryOp::RedXor:
				r = reduce(a, Op::Xor);
				break;
			case UnaryOp::RedNand:
				r = g_not(reduce(a, Op::And));
				break;
			case UnaryOp::RedNor:
				r = g_not(reduce(a, Op::Or));
				break;
			case UnaryOp::RedXnor:
				r = g_not(reduce(a, Op::Xor));
				break;
			default:
				break;
			}
			return resize({r}, w);
		}
		case RKind::Binary:
			return blast_binary(e, w, env);
		case RKind::Ternary: {
			NodeId s = truth(*e.args[0], env);
			Bits a = blast(*e.args[1], w, env);
			Bits b = blast(*e.args[2], w, env);
			Bits out(w);
			for (int k = 0; k < w; ++k)
				out[k] = g_mux(s, a[k], b[k]);
			return out;
		}
		case RKind::Concat: {
			Bits out;
			for (auto it = e.args.rbegin(); it != e.args.rend(); ++it) {
				Bits part = self(**it, env);
				out.insert(out.end(), part.begin(), part.end());
			}
			return resize(std::move(out), w);
		}
		}
		return Bits(w, zero());
	}

	Bits blast_binary(const RExpr &e, int w, const Env &env)
	{
		using frontend::BinaryOp;
		const RExpr &ea = *e.args[0];
		const RExpr &eb = *e.args[1];
		switch (e.binary) {
		case BinaryOp::And:
		case BinaryOp::Or:
		case BinaryOp::Xor:
		case BinaryOp::Xnor: {
			Bits a = blast(ea, w, env), b = blast(eb, w, env);
			Bits out(w);
			for (int k = 0; k < w; ++k) {
				switch (e.binary) {
				case BinaryOp::And:
					out[k] = g_and(a[k], b[k]);
					break;
				case BinaryOp::Or:
					out[k] = g_or(a[k], b[k]);
					break;
				case BinaryOp::Xor:
					out[k] = g_xor(a[k], b[k]);
					break;
				default:
					out[k] = g_not(g_xor(a[k], b[k]));
				}
			}
			return out;
		}
		case BinaryOp::Add:
		case BinaryOp::Sub:
			return add(blast(ea, w, env), blast(eb, w, env), e.binary == BinaryOp::Sub);
		case BinaryOp::Shl:
		case BinaryOp::Shr:
			return shift(blast(ea, w, env), self(eb, env), e.binary == BinaryOp::Shl);
		case BinaryOp::LogicAnd:
			return resize({g_and(truth(ea, env), truth(eb, env))}, w);
		case BinaryOp::LogicOr:
			return resize({g_or(truth(ea, env), truth(eb, env))}, w);
		default:
			break;
		}
		int cw = std::max(ea.width, eb.width);
		Bits a = blast(ea, cw, env), b = blast(eb, cw, env);
		NodeId r = zero();
		switch (e.binary) {
		case BinaryOp::Eq:
			r = compare(MacroKind::Eq, a, b);
			break;
		case BinaryOp::Ne:
			r = compare(MacroKind::Ne, a, b);
			break;
		case BinaryOp::Lt:
			r = compare(MacroKind::Lt, a, b);
			break;
		case BinaryOp::Le:
			r = compare(MacroKind::Le, a, b);
			break;
		case BinaryOp::Gt:
			r = compare(MacroKind::Lt, b, a);
			break;
		case BinaryOp::Ge:
			r = compare(MacroKind::Le, b, a);
			break;
		default:
			break;
		}
		return resize({r}, w);
	}

	// ---- statements ----
	void assign(const frontend::Lvalue &lhs, const RExpr &rhs, bool nonblocking, Env &env)
	{
		int w = lhs.width();
		Bits value = blast(rhs, w, env);
		int pos = 0;
		for (auto seg = lhs.segments.rbegin(); seg != lhs.segments.rend(); ++seg) {
			for (int k = 0; k < seg->width; ++k, ++pos) {
				BitRef bit{seg->net, seg->offset + k};
				(nonblocking ? env.nonblocking : env.blocking)[bit] = value[pos];
			}
		}
	}

	void merge(Env &env, const Env &t, const Env &e, NodeId cond)
	{
		auto merge_map = [&](std::map<BitRef, NodeId> &into, const std::map<BitRef, NodeId> &tm,
				     const std::map<BitRef, NodeId> &em) {
			std::set<BitRef> keys;
			for (const auto &kv : tm)
				keys.insert(kv.first);
			for (const auto &kv : em)
				keys.insert(kv.first);
			for (const BitRef &k : keys) {
				auto fallback = [&]() {
					auto it = into.find(k);
					return it != into.end() ? it->second : raw_.leaf(k);
				};
				auto ti = tm.find(k), ei = em.find(k);
				NodeId tv = ti != tm.end() ? ti->second : fallback();
				NodeId ev = ei != em.end() ? ei->second : fallback();
				into[k] = tv == ev ? tv : g_mux(cond, tv, ev);
			}
		};
		merge_map(env.blocking, t.blocking, e.blocking);
		merge_map(env.nonblocking, t.nonblocking, e.nonblocking);
	}

	void exec(const RStmt &s, Env &env)
	{
		switch (s.kind) {
		case RStmtKind::Block:
			for (const auto &c : s.body)
				exec(*c, env);
			break;
		case RStmtKind::Assign:
			assign(s.lhs, *s.rhs, s.nonblocking, env);
			break;
		case RStmtKind::If: {
			NodeId c = truth(*s.cond, env);
			Env t = env, e = env;
			exec(*s.then_branch, t);
			if (s.else_branch)
				exec(*s.else_branch, e);
			merge(env, t, e, c);
			break;
		}
		case RStmtKind::Case: {
			std::vector<const frontend::RCaseItem *> arms;
			const frontend::RCaseItem *fallback = nullptr;
			for (const auto &item : s.items) {
				if (item.labels.empty())
					fallback = &item;
				else
					arms.push_back(&item);
			}
			exec_case(s, arms, 0, fallback, env);
			break;
		}
		}
	}

	void exec_case(const RStmt &s, const std::vector<const frontend::RCaseItem *> &arms, std::size_t i,
		       const frontend::RCaseItem *fallback, Env &env)
	{
		if (i == arms.size()) {
			if (fallback)
				exec(*fallback->body, env);
			return;
		}
		NodeId cond = zero();
		bool first = true;
		for (const auto &label : arms[i]->labels) {
			int w = std::max(s.cond->width, label->width);
			NodeId eq = compare(MacroKind::Eq, blast(*s.cond, w, env), blast(*label, w, env));
			cond = first ? eq : g_or(cond, eq);
			first = false;
		}
		Env t = env, e = env;
		exec(*arms[i]->body, t);
		exec_case(s, arms, i + 1, fallback, e);
		merge(env, t, e, cond);
	}

	void execute(const frontend::Process &p)
	{
		Env env;
		exec(*p.body, env);
		std::map<BitRef, NodeId> final_values = env.blocking;
		for (const auto &kv : env.nonblocking)
			final_values[kv.first] = kv.second;
		for (const auto &[bit, value] : final_values) {
			driver_[bit] = value;
			if (p.kind == ProcessKind::Sequential)
				registers_.insert(bit);
		}
	}

	// ---- resolution of wire reads ----
	bool is_top_input(const BitRef &bit) const
	{
		const frontend::Net &n = d_.nets[bit.net];
		return n.kind == NetKind::Input && n.top_port;
	}

	NodeId resolve_bit(const BitRef &bit)
	{
		if (is_top_input(bit) || registers_.count(bit))
			return out_.leaf(bit);
		if (auto it = resolved_bits_.find(bit); it != resolved_bits_.end())
			return it->second;
		if (std::find(stack_.begin(), stack_.end(), bit) != stack_.end()) {
			std::vector<std::string> cycle;
			for (auto it = std::find(stack_.begin(), stack_.end(), bit); it != stack_.end(); ++it)
				cycle.push_back(d_.bit_name(*it));
			cycle.push_back(d_.bit_name(bit));
			throw CombinationalLoop(cycle);
		}
		auto drv = driver_.find(bit);
		if (drv == driver_.end())
			throw UnassignedNet(d_.bit_name(bit));
		stack_.push_back(bit);
		NodeId id = resolve_raw(drv->second);
		stack_.pop_back();
		resolved_bits_[bit] = id;
		return id;
	}

	NodeId resolve_raw(NodeId raw)
	{
		if (auto it = resolved_nodes_.find(raw); it != resolved_nodes_.end())
			return it->second;
		const Node &n = raw_.node(raw);
		NodeId id;
		switch (n.op) {
		case Op::Const0:
		case Op::Const1:
			id = out_.constant(n.op == Op::Const1);
			break;
		case Op::Leaf:
			id = resolve_bit(n.leaf);
			break;
		case Op::Macro: {
			int w = n.macro_width();
			Bits a, b;
			for (int i = 0; i < w; ++i) {
				a.push_back(resolve_raw(n.kids[i]));
				b.push_back(resolve_raw(n.kids[w + i]));
			}
			id = out_.macro(n.macro, a, b);
			break;
		}
		default: {
			Bits kids;
			for (NodeId k : n.kids)
				kids.push_back(resolve_raw(k));
			id = out_.make(n.op, kids);
		}
		}
		resolved_nodes_[raw] = id;
		return id;
	}

	const ElaboratedDesign &d_;
	BitBlastOptions opt_;
	Forest raw_;
	Forest out_;
	std::map<BitRef, NodeId> driver_;
	std::set<BitRef> registers_;
	std::unordered_map<BitRef, NodeId, BitRefHash> resolved_bits_;
	std::unordered_map<NodeId, NodeId> resolved_nodes_;
	std::vector<BitRef> stack_;
};

} // namespace

Forest bit_blast(const ElaboratedDesign &design, const BitBlastOptions &options)
{
	return Blaster(design, options).run();
}

std::vector<BitRef> register_leaves(const Forest &forest, NodeId root)
{
	std::set<BitRef> found;
	std::vector<char> seen(forest.size(), 0);
	std::vector<NodeId> stack{root};
	while (!stack.empty()) {
		NodeId id = stack.back();
		stack.pop_back();
		if (seen[id])
			continue;
		seen[id] = 1;
		const Node &n = forest.node(id);
		if (n.op == Op::Leaf && forest.registers.count(n.leaf))
			found.insert(n.leaf);
		for (NodeId k : n.kids)
			stack.push_back(k);
	}
	return {found.begin(), found.end()};
}

DependencyGraph compute_dependencies(const Forest &forest)
{
	DependencyGraph g;
	std::size_t n = forest.roots.size();
	g.edges.resize(n);
	for (std::size_t i = 0; i < n; ++i)
		for (const BitRef &r : register_leaves(forest, forest.roots[i].node))
			g.edges[i].push_back(*forest.root_of(r));

	// Iterative Tarjan; components are emitted after everything they reach.
	constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
	std::vector<std::size_t> index(n, unvisited), low(n, 0);
	std::vector<bool> on_stack(n, false);
	std::vector<std::size_t> stack;
	std::size_t counter = 0;
	g.scc_of.assign(n, 0);
	for (std::size_t start = 0; start < n; ++start) {
		if (index[start] != unvisited)
			continue;
		std::vector<std::pair<std::size_t, std::size_t>> work{{start, 0}};
		index[start] = low[start] = counter++;
		stack.push_back(start);
		on_stack[start] = true;
		while (!work.empty()) {
			auto &[v, next] = work.back();
			if (next < g.edges[v].size()) {
				std::size_t w = g.edges[v][next++];
				if (index[w] == unvisited) {
					index[w] = low[w] = counter++;
					stack.push_back(w);
					on_stack[w] = true;
					work.push_back({w, 0});
				} else if (on_stack[w]) {
					low[v] = std::min(low[v], index[w]);
				}
				continue;
			}
			if (low[v] == index[v]) {
				std::vector<std::size_t> comp;
				std::size_t w;
				do {
					w = stack.back();
					stack.pop_back();
					on_stack[w] = false;
					g.scc_of[w] = g.sccs.size();
					comp.push_back(w);
				} while (w != v);
				std::sort(comp.begin(), comp.end());
				bool cyclic = comp.size() > 1 ||
					      std::find(g.edges[v].begin(), g.edges[v].end(), v) != g.edges[v].end();
				g.sccs.push_back(std::move(comp));
				g.cyclic.push_back(cyclic);
			}
			std::size_t finished = v;
			work.pop_back();
			if (!work.empty())
				low[work.back().first] = std::min(low[work.back().first], low[finished]);
		}
	}
	return g;
}

} // namespace qflow
