/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/channelizer.hpp"

#include "qflow/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>

namespace qflow {

std::uint64_t input_pattern(int index, std::size_t word)
{
	static constexpr std::uint64_t low[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
						 0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
	if (index < 6)
		return low[index];
	return ((word >> (index - 6)) & 1) ? ~0ull : 0ull;
}

bool Channel::row(std::uint64_t assignment) const
{
	if (macro) {
		std::vector<bool> a(macro->width), b(macro->width);
		for (int i = 0; i < 2 * macro->width; ++i) {
			int slot = macro->slots[i];
			bool v = slot == MacroDescriptor::kConst1 || (slot >= 0 && ((assignment >> slot) & 1));
			(i < macro->width ? a[i] : b[i - macro->width]) = v;
		}
		return macro_eval(macro->kind, a, b);
	}
	return (table[assignment >> 6] >> (assignment & 63)) & 1;
}

bool channel_function_eval(const Channel &channel, const std::vector<bool> &assignment)
{
	if (assignment.size() != channel.arity())
		throw ArityMismatch(channel.arity(), assignment.size());
	std::uint64_t row = 0;
	for (std::size_t i = 0; i < assignment.size(); ++i)
		if (assignment[i])
			row |= 1ull << i;
	return channel.row(row);
}

namespace {

// A merge input: a leaf bit, or the output of a finalized channel.
struct Key
{
	bool derived = false;
	BitRef bit;
	int channel = -1;

	auto operator<=>(const Key &) const = default;
};

struct Edge
{
	enum Kind
	{
		Absorb,
		Input,
		Const,
	} kind = Const;
	int piece = -1;
	Key key;
	bool value = false;
};

// An op node with the decision, per child edge, to absorb or cut.
struct Piece
{
	NodeId node = -1;
	Op op = Op::Not;
	std::vector<Edge> edges;
	std::vector<Key> inputs;
};

class Merger
{
      public:
	Merger(const Forest &forest, int max_inputs) : f_(forest), max_(max_inputs) {}

	ChannelGraph run(const DependencyGraph &deps)
	{
		g_.max_channel_inputs = max_;
		g_.root_channel.assign(f_.roots.size(), -1);
		g_.root_channels.resize(f_.roots.size());
		for (const auto &scc : deps.sccs)
			for (std::size_t r : scc)
				build_root(static_cast<int>(r));
		for (Channel &c : g_.channels)
			for (ChannelInput &in : c.inputs)
				if (in.crosses_register())
					in.source = g_.root_channel[*f_.root_of(in.bit)];
		return std::move(g_);
	}

      private:
	void build_root(int r)
	{
		owner_ = r;
		pieces_.clear();
		piece_of_.clear();
		channel_of_.clear();
		NodeId node = f_.roots[r].node;
		const Node &n = f_.node(node);
		int ch;
		if (n.op == Op::Leaf) {
			Channel c;
			c.inputs.push_back(input_for(Key{false, n.leaf, -1}));
			c.table = {0b10};
			c.node = node;
			ch = add(std::move(c));
		} else if (n.is_const()) {
			Channel c;
			c.table = {n.op == Op::Const1 ? 1ull : 0ull};
			c.node = node;
			ch = add(std::move(c));
		} else if (n.op == Op::Macro) {
			ch = finalize_macro(node);
		} else {
			ch = finalize(node);
		}
		g_.channels[ch].root = r;
		g_.root_channel[r] = ch;
	}

	ChannelInput input_for(const Key &key) const
	{
		ChannelInput in;
		if (key.derived) {
			in.label = InputLabel::Derived;
			in.bit = BitRef{-1, 0};
			in.source = key.channel;
			return in;
		}
		in.bit = key.bit;
		switch (f_.role(key.bit)) {
		case BitRole::InputHigh:
			in.label = InputLabel::High;
			break;
		case BitRole::InputLow:
			in.label = InputLabel::Low;
			break;
		default:
			in.label = InputLabel::Derived;
		}
		return in;
	}

	int add(Channel c)
	{
		c.id = static_cast<int>(g_.channels.size());
		c.owner = owner_;
		g_.root_channels[owner_].push_back(c.id);
		g_.channels.push_back(std::move(c));
		return g_.channels.back().id;
	}

	static void insert_key(std::vector<Key> &set, const Key &k)
	{
		auto it = std::lower_bound(set.begin(), set.end(), k);
		if (it == set.end() || *it != k)
			set.insert(it, k);
	}

	static std::vector<Key> unite(const std::vector<Key> &a, const std::vector<Key> &b)
	{
		std::vector<Key> out;
		std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
		return out;
	}

	int build_piece(NodeId node)
	{
		if (auto it = piece_of_.find(node); it != piece_of_.end())
			return it->second;
		const Node &n = f_.node(node);
		Piece p;
		p.node = node;
		p.op = n.op;
		p.edges.resize(n.kids.size());
		std::vector<std::pair<std::size_t, int>> candidates;
		for (std::size_t i = 0; i < n.kids.size(); ++i) {
			const Node &kid = f_.node(n.kids[i]);
			Edge &e = p.edges[i];
			if (kid.is_const()) {
				e.kind = Edge::Const;
				e.value = kid.op == Op::Const1;
			} else if (kid.op == Op::Leaf) {
				e.kind = Edge::Input;
				e.key = Key{false, kid.leaf, -1};
				insert_key(p.inputs, e.key);
			} else if (kid.op == Op::Macro) {
				e.kind = Edge::Input;
				e.key = Key{true, {}, finalize_macro(n.kids[i])};
				insert_key(p.inputs, e.key);
			} else {
				candidates.push_back({i, build_piece(n.kids[i])});
			}
		}
		std::stable_sort(candidates.begin(), candidates.end(), [&](const auto &a, const auto &b) {
			const auto &ia = pieces_[a.second].inputs, &ib = pieces_[b.second].inputs;
			if (ia.size() != ib.size())
				return ia.size() < ib.size();
			return !ia.empty() && !ib.empty() && ia.front() < ib.front();
		});
		// Every undecided sibling keeps one slot in reserve for the case it is cut.
		for (std::size_t c = 0; c < candidates.size(); ++c) {
			const auto &[i, kid_piece] = candidates[c];
			std::vector<Key> merged = unite(p.inputs, pieces_[kid_piece].inputs);
			Edge &e = p.edges[i];
			std::size_t reserved = candidates.size() - c - 1;
			if (merged.size() + reserved <= static_cast<std::size_t>(max_)) {
				e.kind = Edge::Absorb;
				e.piece = kid_piece;
				p.inputs = std::move(merged);
			} else {
				e.kind = Edge::Input;
				e.key = Key{true, {}, finalize(n.kids[i])};
				insert_key(p.inputs, e.key);
			}
		}
		int id = static_cast<int>(pieces_.size());
		pieces_.push_back(std::move(p));
		piece_of_[node] = id;
		return id;
	}

	using Words = std::vector<std::uint64_t>;

	Words eval_piece(int piece, const std::vector<Key> &inputs, std::size_t words, std::map<int, Words> &memo)
	{
		if (auto it = memo.find(piece); it != memo.end())
			return it->second;
		const Piece &p = pieces_[piece];
		std::vector<Words> kids;
		for (const Edge &e : p.edges) {
			switch (e.kind) {
			case Edge::Const:
				kids.emplace_back(words, e.value ? ~0ull : 0ull);
				break;
			case Edge::Absorb:
				kids.push_back(eval_piece(e.piece, inputs, words, memo));
				break;
			case Edge::Input: {
				int idx = static_cast<int>(std::lower_bound(inputs.begin(), inputs.end(), e.key) - inputs.begin());
				Words w(words);
				for (std::size_t k = 0; k < words; ++k)
					w[k] = input_pattern(idx, k);
				kids.push_back(std::move(w));
				break;
			}
			}
		}
		Words out(words);
		for (std::size_t k = 0; k < words; ++k) {
			switch (p.op) {
			case Op::Not:
				out[k] = ~kids[0][k];
				break;
			case Op::And:
				out[k] = kids[0][k] & kids[1][k];
				break;
			case Op::Or:
				out[k] = kids[0][k] | kids[1][k];
				break;
			case Op::Xor:
				out[k] = kids[0][k] ^ kids[1][k];
				break;
			case Op::Mux:
				out[k] = (kids[0][k] & kids[1][k]) | (~kids[0][k] & kids[2][k]);
				break;
			default:
				break;
			}
		}
		memo[piece] = out;
		return out;
	}

	int finalize(NodeId node)
	{
		if (auto it = channel_of_.find(node); it != channel_of_.end())
			return it->second;
		int piece = build_piece(node);
		const std::vector<Key> inputs = pieces_[piece].inputs;
		std::size_t rows = std::size_t{1} << inputs.size();
		std::size_t words = std::max<std::size_t>(1, rows / 64);
		std::map<int, Words> memo;
		Channel c;
		c.table = eval_piece(piece, inputs, words, memo);
		if (rows < 64)
			c.table[0] &= (1ull << rows) - 1;
		for (const Key &k : inputs)
			c.inputs.push_back(input_for(k));
		c.node = node;
		int id = add(std::move(c));
		channel_of_[node] = id;
		return id;
	}

	int finalize_macro(NodeId node)
	{
		if (auto it = channel_of_.find(node); it != channel_of_.end())
			return it->second;
		const Node &n = f_.node(node);
		std::vector<Key> slot_keys(n.kids.size());
		std::vector<int> const_slots(n.kids.size(), 0);
		std::vector<Key> inputs;
		for (std::size_t i = 0; i < n.kids.size(); ++i) {
			const Node &kid = f_.node(n.kids[i]);
			if (kid.is_const()) {
				const_slots[i] = kid.op == Op::Const1 ? MacroDescriptor::kConst1 : MacroDescriptor::kConst0;
				continue;
			}
			if (kid.op == Op::Leaf)
				slot_keys[i] = Key{false, kid.leaf, -1};
			else if (kid.op == Op::Macro)
				slot_keys[i] = Key{true, {}, finalize_macro(n.kids[i])};
			else
				slot_keys[i] = Key{true, {}, finalize(n.kids[i])};
			insert_key(inputs, slot_keys[i]);
		}
		MacroDescriptor m;
		m.kind = n.macro;
		m.width = n.macro_width();
		for (std::size_t i = 0; i < n.kids.size(); ++i)
			m.slots.push_back(const_slots[i] != 0 ? const_slots[i]
							      : static_cast<int>(std::lower_bound(inputs.begin(), inputs.end(),
												  slot_keys[i]) -
										 inputs.begin()));
		Channel c;
		for (const Key &k : inputs)
			c.inputs.push_back(input_for(k));
		c.macro = std::move(m);
		c.node = node;
		c.uniform_high_override = true;
		int id = add(std::move(c));
		channel_of_[node] = id;
		return id;
	}

	const Forest &f_;
	int max_;
	ChannelGraph g_;
	int owner_ = -1;
	std::vector<Piece> pieces_;
	std::unordered_map<NodeId, int> piece_of_;
	std::unordered_map<NodeId, int> channel_of_;
};

} // namespace

ChannelGraph merge(const Forest &forest, const DependencyGraph &deps, int max_channel_inputs)
{
	if (max_channel_inputs < 1 || max_channel_inputs > 16)
		throw ConfigError("max_channel_inputs must be in [1, 16], got " + std::to_string(max_channel_inputs));
	return Merger(forest, max_channel_inputs).run(deps);
}

std::string dump_channels(const ChannelGraph &graph, const Forest &forest)
{
	std::string out;
	for (const Channel &c : graph.channels) {
		out += "c" + std::to_string(c.id) + " owner=" + forest.bit_name(forest.roots[c.owner].bit);
		if (c.root >= 0)
			out += " root";
		out += " inputs=[";
		for (std::size_t i = 0; i < c.inputs.size(); ++i) {
			const ChannelInput &in = c.inputs[i];
			if (i)
				out += " ";
			switch (in.label) {
			case InputLabel::High:
				out += "H:" + forest.bit_name(in.bit);
				break;
			case InputLabel::Low:
				out += "L:" + forest.bit_name(in.bit);
				break;
			case InputLabel::Derived:
				out += "D:c" + std::to_string(in.source);
				if (in.bit.net >= 0)
					out += "/" + forest.bit_name(in.bit);
				break;
			}
		}
		out += "]";
		if (c.macro) {
			out += std::string(" macro=") + macro_name(c.macro->kind) + std::to_string(c.macro->width) + " slots=";
			for (std::size_t i = 0; i < c.macro->slots.size(); ++i) {
				int s = c.macro->slots[i];
				out += (i ? "," : "") + (s == MacroDescriptor::kConst0   ? std::string("0")
							 : s == MacroDescriptor::kConst1 ? std::string("1")
											 : "i" + std::to_string(s));
			}
		} else {
			out += " table=0x";
			std::size_t rows = std::size_t{1} << c.inputs.size();
			std::size_t digits = std::max<std::size_t>(1, rows / 4);
			std::string hex;
			for (std::size_t d = 0; d < digits; ++d) {
				std::uint64_t nib = (c.table[(d * 4) / 64] >> ((d * 4) % 64)) & 0xF;
				if (rows < 4)
					nib &= (1u << rows) - 1;
				hex.insert(hex.begin(), "0123456789abcdef"[nib]);
			}
			out += hex;
		}
		out += "\n";
	}
	return out;
}

} // namespace qflow
