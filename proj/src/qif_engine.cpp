/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/qif_engine.hpp"

#include "qflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qflow {

double source_leakage(double p1)
{
	double m = std::max(p1, 1.0 - p1);
	return m >= 1.0 ? 0.0 : -std::log2(m);
}

double InputProbabilities::get(const BitRef &bit) const
{
	auto it = bits.find(bit);
	return it == bits.end() ? fallback : it->second;
}

// ---- LeakageVector ----

double LeakageVector::at(int secret) const
{
	auto it = std::lower_bound(entries.begin(), entries.end(), secret,
				   [](const std::pair<int, double> &e, int s) { return e.first < s; });
	return it != entries.end() && it->first == secret ? it->second : 0.0;
}

void LeakageVector::add(int secret, double value)
{
	auto it = std::lower_bound(entries.begin(), entries.end(), secret,
				   [](const std::pair<int, double> &e, int s) { return e.first < s; });
	if (it != entries.end() && it->first == secret)
		it->second += value;
	else
		entries.insert(it, {secret, value});
}

void LeakageVector::add_scaled(const LeakageVector &other, double scale)
{
	std::vector<std::pair<int, double>> out;
	out.reserve(entries.size() + other.entries.size());
	auto a = entries.cbegin();
	auto b = other.entries.cbegin();
	while (a != entries.cend() || b != other.entries.end()) {
		if (b == other.entries.end() || (a != entries.cend() && a->first < b->first)) {
			out.push_back(*a++);
		} else if (a == entries.cend() || b->first < a->first) {
			out.push_back({b->first, b->second * scale});
			++b;
		} else {
			out.push_back({a->first, a->second + b->second * scale});
			++a, ++b;
		}
	}
	entries = std::move(out);
}

LeakageVector LeakageVector::scaled(double factor) const
{
	LeakageVector out = *this;
	for (auto &e : out.entries)
		e.second *= factor;
	return out;
}

double LeakageVector::distance(const LeakageVector &other) const
{
	LeakageVector diff = *this;
	diff.add_scaled(other, -1.0);
	double d = 0.0;
	for (const auto &e : diff.entries)
		d = std::max(d, std::abs(e.second));
	return d;
}

LeakageVector LeakageVector::max(const LeakageVector &a, const LeakageVector &b)
{
	LeakageVector out = a;
	for (const auto &[id, v] : b.entries) {
		double cur = out.at(id);
		if (v > cur)
			out.add(id, v - cur);
	}
	return out;
}

// ---- joint distribution and PBV ----

double JointTable::at(int o, std::uint64_t l, std::uint64_t h) const
{
	std::size_t index = ((static_cast<std::size_t>(o) << low.size()) + l) << high.size();
	return mass.at(index + h);
}

double JointTable::total() const
{
	double s = 0.0;
	for (double m : mass)
		s += m;
	return s;
}

namespace {

void check_view(const Channel &channel, const ChannelInputs &in)
{
	if (in.p1.size() != channel.arity())
		throw ArityMismatch(channel.arity(), in.p1.size());
	if (in.high.size() != channel.arity())
		throw ArityMismatch(channel.arity(), in.high.size());
}

std::vector<double> effective_p(const Channel &channel, const ChannelInputs &in)
{
	std::vector<double> p = in.p1;
	if (channel.uniform_high_override)
		for (std::size_t i = 0; i < p.size(); ++i)
			if (in.high[i])
				p[i] = 0.5;
	return p;
}

// Row probabilities and low/high sub-indices, split into two byte-sized halves.
struct RowTables
{
	int n = 0;
	std::vector<double> prob_lo, prob_hi;
	std::vector<std::uint32_t> l_lo, l_hi, h_lo, h_hi;

	RowTables(const std::vector<double> &p, const std::vector<bool> &high)
	{
		n = static_cast<int>(p.size());
		int split = std::min(n, 8);
		auto build = [&](int from, int to, std::vector<double> &prob, std::vector<std::uint32_t> &lix,
				 std::vector<std::uint32_t> &hix) {
			std::size_t size = std::size_t{1} << (to - from);
			prob.assign(size, 1.0);
			lix.assign(size, 0);
			hix.assign(size, 0);
			int lpos = 0, hpos = 0;
			for (int i = 0; i < from; ++i)
				(high[i] ? hpos : lpos)++;
			for (std::size_t r = 0; r < size; ++r) {
				int lp = lpos, hp = hpos;
				for (int i = from; i < to; ++i) {
					bool bit = (r >> (i - from)) & 1;
					prob[r] *= bit ? p[i] : 1.0 - p[i];
					if (high[i])
						hix[r] |= static_cast<std::uint32_t>(bit) << hp++;
					else
						lix[r] |= static_cast<std::uint32_t>(bit) << lp++;
				}
			}
		};
		build(0, split, prob_lo, l_lo, h_lo);
		build(split, n, prob_hi, l_hi, h_hi);
	}

	double prob(std::uint64_t row) const { return prob_lo[row & 0xFF] * prob_hi[row >> 8]; }
	std::uint32_t l(std::uint64_t row) const { return l_lo[row & 0xFF] | l_hi[row >> 8]; }
	std::uint32_t h(std::uint64_t row) const { return h_lo[row & 0xFF] | h_hi[row >> 8]; }
};

double enumerate_pbv(const Channel &channel, const std::vector<double> &p, const std::vector<bool> &high)
{
	int nl = static_cast<int>(std::count(high.begin(), high.end(), false));
	RowTables t(p, high);
	std::vector<double> best(std::size_t{2} << nl, 0.0);
	std::uint64_t rows = std::uint64_t{1} << channel.arity();
	for (std::uint64_t r = 0; r < rows; ++r) {
		double m = t.prob(r);
		std::size_t cell = (static_cast<std::size_t>(channel.row(r)) << nl) | t.l(r);
		best[cell] = std::max(best[cell], m);
	}
	double v = 0.0;
	for (double b : best)
		v += b;
	return v;
}

double enumerate_p1(const Channel &channel, const std::vector<double> &p)
{
	RowTables t(p, std::vector<bool>(p.size(), false));
	double s = 0.0;
	std::uint64_t rows = std::uint64_t{1} << channel.arity();
	for (std::uint64_t r = 0; r < rows; ++r)
		if (channel.row(r))
			s += t.prob(r);
	return s;
}

// P(value < c) and P(value == c) for independent bits with P(bit k = 1) = q[k].
std::pair<double, double> less_and_equal(const std::vector<double> &q, const std::vector<bool> &c)
{
	double less = 0.0, prefix = 1.0;
	for (std::size_t k = q.size(); k-- > 0;) {
		if (c[k])
			less += prefix * (1.0 - q[k]);
		prefix *= c[k] ? q[k] : 1.0 - q[k];
	}
	return {less, prefix};
}

} // namespace

JointTable joint_distribution(const Channel &channel, const ChannelInputs &in)
{
	check_view(channel, in);
	if (channel.arity() > static_cast<std::size_t>(kEnumerationLimit))
		throw TooLarge(static_cast<int>(channel.arity()), kEnumerationLimit);
	std::vector<double> p = effective_p(channel, in);
	JointTable j;
	for (std::size_t i = 0; i < in.high.size(); ++i)
		(in.high[i] ? j.high : j.low).push_back(static_cast<int>(i));
	RowTables t(p, in.high);
	j.mass.assign(std::size_t{2} << channel.arity(), 0.0);
	std::uint64_t rows = std::uint64_t{1} << channel.arity();
	for (std::uint64_t r = 0; r < rows; ++r) {
		std::size_t index = ((static_cast<std::size_t>(channel.row(r)) << j.low.size()) + t.l(r)) << j.high.size();
		j.mass[index + t.h(r)] += t.prob(r);
	}
	return j;
}

std::optional<double> macro_pbv_closed_form(const Channel &channel, const ChannelInputs &in)
{
	check_view(channel, in);
	if (!channel.macro)
		return std::nullopt;
	const MacroDescriptor &m = *channel.macro;
	int nh = static_cast<int>(std::count(in.high.begin(), in.high.end(), true));
	if (nh == 0)
		return 1.0;
	double unit = std::ldexp(1.0, -nh);

	std::vector<int> uses(channel.arity(), 0);
	for (int s : m.slots)
		if (s >= 0)
			++uses[s];
	auto is_high_slot = [&](int i) { return m.slots[i] >= 0 && in.high[m.slots[i]]; };

	if (m.kind == MacroKind::Add || m.kind == MacroKind::Sub) {
		// A High bit that only enters at the top position flips the output for every other assignment.
		for (int top : {m.width - 1, 2 * m.width - 1})
			if (is_high_slot(top) && uses[m.slots[top]] == 1)
				return 2.0 * unit;
		return std::nullopt;
	}

	for (std::size_t i = 0; i < uses.size(); ++i)
		if (uses[i] != 1)
			return std::nullopt;
	bool high_a = false, high_b = false;
	for (int i = 0; i < 2 * m.width; ++i)
		if (is_high_slot(i))
			(i < m.width ? high_a : high_b) = true;
	if (high_a == high_b)
		return std::nullopt;
	int h_off = high_a ? 0 : m.width;
	int l_off = high_a ? m.width : 0;

	std::vector<double> q(m.width);
	std::vector<bool> hmin(m.width), hmax(m.width);
	for (int k = 0; k < m.width; ++k) {
		int ls = m.slots[l_off + k];
		q[k] = ls == MacroDescriptor::kConst1 ? 1.0 : ls == MacroDescriptor::kConst0 ? 0.0 : in.p1[ls];
		int hs = m.slots[h_off + k];
		hmin[k] = hs == MacroDescriptor::kConst1;
		hmax[k] = hs != MacroDescriptor::kConst0;
	}

	double nonconst = 0.0;
	switch (m.kind) {
	case MacroKind::Eq:
	case MacroKind::Ne: {
		nonconst = 1.0;
		for (int k = 0; k < m.width; ++k) {
			int hs = m.slots[h_off + k];
			if (hs < 0)
				nonconst *= hs == MacroDescriptor::kConst1 ? q[k] : 1.0 - q[k];
		}
		break;
	}
	case MacroKind::Lt:
	case MacroKind::Le: {
		auto [lt_max, eq_max] = less_and_equal(q, hmax);
		auto [lt_min, eq_min] = less_and_equal(q, hmin);
		// h < l and l <= h change value across min < l <= max; the other two across min <= l < max.
		bool upper_closed = (m.kind == MacroKind::Lt) == high_a;
		nonconst = upper_closed ? (lt_max + eq_max) - (lt_min + eq_min) : lt_max - lt_min;
		break;
	}
	default:
		break;
	}
	return unit * (1.0 + std::clamp(nonconst, 0.0, 1.0));
}

double macro_p1_closed_form(const Channel &channel, const std::vector<double> &p1)
{
	const MacroDescriptor &m = *channel.macro;
	auto q = [&](int slot) {
		int s = m.slots[slot];
		return s == MacroDescriptor::kConst1 ? 1.0 : s == MacroDescriptor::kConst0 ? 0.0 : p1[s];
	};
	auto xor_p = [](double a, double b) { return a * (1.0 - b) + b * (1.0 - a); };
	if (m.kind == MacroKind::Add || m.kind == MacroKind::Sub) {
		double carry = m.kind == MacroKind::Sub ? 1.0 : 0.0;
		double out = 0.0;
		for (int k = 0; k < m.width; ++k) {
			double a = q(k), b = m.kind == MacroKind::Sub ? 1.0 - q(m.width + k) : q(m.width + k);
			out = xor_p(xor_p(a, b), carry);
			carry = a * b + xor_p(a, b) * carry;
		}
		return out;
	}
	double eq = 1.0, lt = 0.0;
	for (int k = m.width - 1; k >= 0; --k) {
		double a = q(k), b = q(m.width + k);
		lt += eq * (1.0 - a) * b;
		eq *= a * b + (1.0 - a) * (1.0 - b);
	}
	switch (m.kind) {
	case MacroKind::Eq:
		return eq;
	case MacroKind::Ne:
		return 1.0 - eq;
	case MacroKind::Lt:
		return lt;
	default:
		return lt + eq;
	}
}

double channel_pbv(const Channel &channel, const ChannelInputs &in)
{
	check_view(channel, in);
	if (channel.macro) {
		if (auto v = macro_pbv_closed_form(channel, in))
			return *v;
		if (channel.arity() > static_cast<std::size_t>(kEnumerationLimit))
			return 1.0;
	}
	return enumerate_pbv(channel, effective_p(channel, in), in.high);
}

double channel_p1(const Channel &channel, const std::vector<double> &p1)
{
	if (p1.size() != channel.arity())
		throw ArityMismatch(channel.arity(), p1.size());
	if (channel.macro && channel.arity() > static_cast<std::size_t>(kEnumerationLimit))
		return macro_p1_closed_form(channel, p1);
	return enumerate_p1(channel, p1);
}

// ---- graph propagation ----

ChannelInputs ProbAnnotatedGraph::inputs_of(int c) const
{
	const Channel &ch = graph->channels[c];
	ChannelInputs in;
	for (const ChannelInput &i : ch.inputs) {
		switch (i.label) {
		case InputLabel::High:
			in.p1.push_back(probs.get(i.bit));
			in.high.push_back(true);
			break;
		case InputLabel::Low:
			in.p1.push_back(probs.get(i.bit));
			in.high.push_back(false);
			break;
		case InputLabel::Derived:
			in.p1.push_back(channels[i.source].p1);
			in.high.push_back(channels[i.source].secret);
			break;
		}
	}
	return in;
}

namespace {

std::vector<int> scc_channels(const ChannelGraph &graph, const std::vector<std::size_t> &scc)
{
	std::vector<int> out;
	for (std::size_t r : scc)
		out.insert(out.end(), graph.root_channels[r].begin(), graph.root_channels[r].end());
	return out;
}

std::vector<std::string> register_names(const Forest &forest, const std::vector<std::size_t> &scc)
{
	std::vector<std::string> names;
	for (std::size_t r : scc)
		names.push_back(forest.bit_name(forest.roots[r].bit));
	return names;
}

void mark_secret(ProbAnnotatedGraph &a)
{
	bool changed = true;
	while (changed) {
		changed = false;
		for (const Channel &c : a.graph->channels) {
			if (a.channels[c.id].secret)
				continue;
			for (const ChannelInput &in : c.inputs) {
				if (in.label == InputLabel::High ||
				    (in.label == InputLabel::Derived && a.channels[in.source].secret)) {
					a.channels[c.id].secret = true;
					changed = true;
					break;
				}
			}
		}
	}
}

} // namespace

ProbAnnotatedGraph propagate_probabilities(const Forest &forest, const ChannelGraph &graph, const DependencyGraph &deps,
					   const InputProbabilities &probs, const EngineOptions &options)
{
	ProbAnnotatedGraph a;
	a.forest = &forest;
	a.graph = &graph;
	a.deps = &deps;
	a.probs = probs;
	a.channels.resize(graph.channels.size());
	mark_secret(a);

	auto compute = [&](int c) { return channel_p1(graph.channels[c], a.inputs_of(c).p1); };
	for (std::size_t s = 0; s < deps.sccs.size(); ++s) {
		std::vector<int> chans = scc_channels(graph, deps.sccs[s]);
		if (!deps.cyclic[s]) {
			for (int c : chans)
				a.channels[c].p1 = compute(c);
			continue;
		}
		// Plain iteration first; damped afterwards for oscillating registers.
		bool converged = false;
		for (int it = 0; it < 10 * options.max_iterations && !converged; ++it) {
			double damping = it < options.max_iterations ? 1.0 : 0.5;
			double delta = 0.0;
			for (int c : chans) {
				double old = a.channels[c].p1;
				double next = compute(c);
				if (graph.channels[c].root >= 0)
					next = old + damping * (next - old);
				a.channels[c].p1 = next;
				if (graph.channels[c].root >= 0)
					delta = std::max(delta, std::abs(next - old));
			}
			++a.iterations;
			converged = delta < options.tolerance;
		}
		if (!converged)
			throw NonConvergentFixpoint(register_names(forest, deps.sccs[s]));
	}
	return a;
}

void propagate_leakage(ProbAnnotatedGraph &a, const EngineOptions &options)
{
	const ChannelGraph &graph = *a.graph;
	const Forest &forest = *a.forest;
	const DependencyGraph &deps = *a.deps;
	for (const Channel &c : graph.channels)
		a.channels[c.id].pbv = channel_pbv(c, a.inputs_of(c.id));

	std::vector<double> source(forest.high_bits.size());
	for (std::size_t j = 0; j < source.size(); ++j)
		source[j] = source_leakage(a.probs.get(forest.high_bits[j]));

	auto compute = [&](int id) {
		const Channel &c = graph.channels[id];
		LeakageVector sum;
		for (const ChannelInput &in : c.inputs) {
			if (in.label == InputLabel::High) {
				int j = forest.secret_id(in.bit);
				sum.add(j, source[j]);
			} else if (in.label == InputLabel::Derived) {
				sum.add_scaled(a.channels[in.source].leakage, 1.0);
			}
		}
		return sum.scaled(a.channels[id].pbv);
	};

	for (std::size_t s = 0; s < deps.sccs.size(); ++s) {
		std::vector<int> chans = scc_channels(graph, deps.sccs[s]);
		if (!deps.cyclic[s]) {
			for (int c : chans)
				a.channels[c].leakage = compute(c);
			continue;
		}
		bool converged = false;
		for (int it = 0; it < options.max_iterations && !converged; ++it) {
			double delta = 0.0;
			for (int c : chans) {
				LeakageVector next = compute(c);
				if (graph.channels[c].root >= 0) {
					next = LeakageVector::max(a.channels[c].leakage, next);
					if (options.cap)
						for (auto &[j, v] : next.entries)
							v = std::min(v, source[j]);
					delta = std::max(delta, next.distance(a.channels[c].leakage));
				}
				a.channels[c].leakage = std::move(next);
			}
			++a.iterations;
			converged = delta < options.tolerance;
		}
		if (!converged)
			throw NonConvergentFixpoint(register_names(forest, deps.sccs[s]));
	}
}

LeakageVector LeakageTotals::vector() const
{
	LeakageVector v;
	for (const SecretTotal &s : secrets)
		v.entries.push_back({s.secret, s.total});
	return v;
}

double LeakageTotals::sum() const
{
	double s = 0.0;
	for (const SecretTotal &t : secrets)
		s += t.total;
	return s;
}

LeakageTotals accumulate_totals(const ProbAnnotatedGraph &a, bool cap)
{
	const Forest &forest = *a.forest;
	LeakageTotals totals;
	totals.cap = cap;
	for (std::size_t j = 0; j < forest.high_bits.size(); ++j) {
		SecretTotal t;
		t.secret = static_cast<int>(j);
		t.bit = forest.high_bits[j];
		t.source = source_leakage(a.probs.get(t.bit));
		totals.secrets.push_back(t);
	}
	for (std::size_t r = 0; r < forest.roots.size(); ++r) {
		if (!forest.roots[r].is_output)
			continue;
		for (const auto &[j, v] : a.channels[a.graph->root_channel[r]].leakage.entries) {
			if (v <= 0.0)
				continue;
			totals.secrets[j].paths.push_back({r, v});
			totals.secrets[j].raw += v;
		}
	}
	for (SecretTotal &t : totals.secrets)
		t.total = cap ? std::min(t.raw, t.source) : t.raw;
	return totals;
}

} // namespace qflow
