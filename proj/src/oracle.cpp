/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/oracle.hpp"

#include "qflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace qflow {

FlatFunction flatten(const Forest &forest, int cycles)
{
	FlatFunction f;
	std::vector<char> reachable(forest.size(), 0);
	std::vector<NodeId> stack;
	for (const Root &r : forest.roots)
		stack.push_back(r.node);
	while (!stack.empty()) {
		NodeId id = stack.back();
		stack.pop_back();
		if (reachable[id])
			continue;
		reachable[id] = 1;
		for (NodeId k : forest.node(id).kids)
			stack.push_back(k);
	}

	std::map<BitRef, int> high_index, low_index, reg_index;
	for (const BitRef &r : forest.registers)
		reg_index.emplace(r, static_cast<int>(reg_index.size()));
	for (std::size_t id = 0; id < forest.size(); ++id) {
		const Node &n = forest.node(static_cast<NodeId>(id));
		if (!reachable[id] || n.op != Op::Leaf)
			continue;
		BitRole role = forest.role(n.leaf);
		if (role == BitRole::InputHigh)
			high_index.emplace(n.leaf, 0);
		else if (role == BitRole::InputLow)
			low_index.emplace(n.leaf, 0);
	}
	for (auto &[bit, idx] : high_index) {
		idx = static_cast<int>(f.high.size());
		f.high.push_back(bit);
	}
	for (auto &[bit, idx] : low_index) {
		idx = static_cast<int>(f.low.size());
		f.low.push_back(bit);
	}

	// Node ids are topological: kids are always interned before their parent.
	std::vector<int> slot(forest.size(), -1);
	for (std::size_t id = 0; id < forest.size(); ++id) {
		if (!reachable[id])
			continue;
		const Node &n = forest.node(static_cast<NodeId>(id));
		FlatFunction::Instr in;
		in.op = n.op;
		in.macro = n.macro;
		switch (n.op) {
		case Op::Const0:
			in.source = FlatFunction::Zero;
			break;
		case Op::Const1:
			in.source = FlatFunction::One;
			break;
		case Op::Leaf:
			if (auto it = high_index.find(n.leaf); it != high_index.end()) {
				in.source = FlatFunction::High;
				in.index = it->second;
			} else if (auto lt = low_index.find(n.leaf); lt != low_index.end()) {
				in.source = FlatFunction::Low;
				in.index = lt->second;
			} else {
				in.source = FlatFunction::Register;
				in.index = reg_index.at(n.leaf);
			}
			break;
		default:
			in.source = FlatFunction::Gate;
			for (NodeId k : n.kids)
				in.kids.push_back(slot[k]);
		}
		slot[id] = static_cast<int>(f.program_.size());
		f.program_.push_back(std::move(in));
	}

	f.next_state_.assign(reg_index.size(), -1);
	for (const Root &r : forest.roots) {
		if (r.is_register)
			f.next_state_[reg_index.at(r.bit)] = slot[r.node];
		if (r.is_output) {
			f.outputs.push_back(r.bit);
			f.output_slot_.push_back(slot[r.node]);
			f.output_register_.push_back(r.is_register ? reg_index.at(r.bit) : -1);
		}
	}
	f.cycles = reg_index.empty() ? 1 : cycles;
	return f;
}

void FlatFunction::eval(const std::vector<std::uint64_t> &high_words, const std::vector<std::uint64_t> &low_words,
			std::vector<std::uint64_t> &observation) const
{
	std::vector<std::uint64_t> regs(next_state_.size(), 0), values(program_.size(), 0), next(next_state_.size());
	observation.assign(observation_bits(), 0);
	for (int cycle = 0; cycle < cycles; ++cycle) {
		for (std::size_t i = 0; i < program_.size(); ++i) {
			const Instr &in = program_[i];
			std::uint64_t v = 0;
			switch (in.source) {
			case Zero:
				v = 0;
				break;
			case One:
				v = ~0ull;
				break;
			case High:
				v = high_words[in.index];
				break;
			case Low:
				v = low_words[in.index];
				break;
			case Register:
				v = regs[in.index];
				break;
			case Gate: {
				const auto &k = in.kids;
				switch (in.op) {
				case Op::Not:
					v = ~values[k[0]];
					break;
				case Op::And:
					v = values[k[0]] & values[k[1]];
					break;
				case Op::Or:
					v = values[k[0]] | values[k[1]];
					break;
				case Op::Xor:
					v = values[k[0]] ^ values[k[1]];
					break;
				case Op::Mux:
					v = (values[k[0]] & values[k[1]]) | (~values[k[0]] & values[k[2]]);
					break;
				case Op::Macro: {
					std::size_t w = k.size() / 2;
					std::vector<bool> a(w), b(w);
					for (int lane = 0; lane < 64; ++lane) {
						for (std::size_t j = 0; j < w; ++j) {
							a[j] = (values[k[j]] >> lane) & 1;
							b[j] = (values[k[w + j]] >> lane) & 1;
						}
						if (macro_eval(in.macro, a, b))
							v |= 1ull << lane;
					}
					break;
				}
				default:
					break;
				}
				break;
			}
			}
			values[i] = v;
		}
		for (std::size_t o = 0; o < outputs.size(); ++o)
			observation[cycle * outputs.size() + o] =
			    output_register_[o] >= 0 ? regs[output_register_[o]] : values[output_slot_[o]];
		for (std::size_t r = 0; r < next_state_.size(); ++r)
			next[r] = next_state_[r] >= 0 ? values[next_state_[r]] : regs[r];
		regs.swap(next);
	}
}

std::vector<bool> FlatFunction::eval(const std::vector<bool> &h, const std::vector<bool> &l) const
{
	std::vector<std::uint64_t> hw(h.size()), lw(l.size()), obs;
	for (std::size_t i = 0; i < h.size(); ++i)
		hw[i] = h[i] ? 1 : 0;
	for (std::size_t i = 0; i < l.size(); ++i)
		lw[i] = l[i] ? 1 : 0;
	eval(hw, lw, obs);
	std::vector<bool> out;
	for (std::uint64_t w : obs)
		out.push_back(w & 1);
	return out;
}

unsigned worker_threads()
{
	unsigned n = std::max(1u, std::thread::hardware_concurrency());
	if (const char *env = std::getenv("QFLOW_THREADS")) {
		int cap = std::atoi(env);
		if (cap >= 1)
			n = std::min(n, static_cast<unsigned>(cap));
	}
	return n;
}

double exact_prior_vulnerability(const std::vector<double> &high_p1)
{
	if (high_p1.size() > static_cast<std::size_t>(kOracleMaxBits))
		throw TooLarge(static_cast<int>(high_p1.size()), kOracleMaxBits);
	double v = 1.0;
	for (double p : high_p1)
		v *= std::max(p, 1.0 - p);
	return v;
}

namespace {

struct WordsHash
{
	std::size_t operator()(const std::vector<std::uint64_t> &w) const noexcept
	{
		std::size_t h = 1469598103934665603ull;
		for (std::uint64_t x : w)
			h = (h ^ x) * 1099511628211ull;
		return h;
	}
};

// Sum over observations o of max over h of pi(h) for one fixed low assignment.
double best_guesses(const FlatFunction &f, const std::vector<double> &high_p1, std::uint64_t l)
{
	std::size_t nh = f.high.size();
	std::vector<std::uint64_t> low_words(f.low.size());
	for (std::size_t i = 0; i < f.low.size(); ++i)
		low_words[i] = ((l >> i) & 1) ? ~0ull : 0ull;
	std::uint64_t total = std::uint64_t{1} << nh;
	std::size_t lanes = std::min<std::uint64_t>(64, total);
	std::unordered_map<std::vector<std::uint64_t>, double, WordsHash> best;
	std::vector<std::uint64_t> high_words(nh), obs;
	std::size_t bits = f.observation_bits();
	std::size_t sig_words = (bits + 63) / 64;
	for (std::uint64_t base = 0; base < total; base += lanes) {
		for (std::size_t i = 0; i < nh; ++i) {
			std::uint64_t w = 0;
			for (std::size_t lane = 0; lane < lanes; ++lane)
				if (((base + lane) >> i) & 1)
					w |= 1ull << lane;
			high_words[i] = w;
		}
		f.eval(high_words, low_words, obs);
		for (std::size_t lane = 0; lane < lanes; ++lane) {
			std::uint64_t h = base + lane;
			std::vector<std::uint64_t> sig(sig_words, 0);
			for (std::size_t b = 0; b < bits; ++b)
				if ((obs[b] >> lane) & 1)
					sig[b / 64] |= 1ull << (b % 64);
			double p = 1.0;
			for (std::size_t i = 0; i < nh; ++i)
				p *= ((h >> i) & 1) ? high_p1[i] : 1.0 - high_p1[i];
			double &slot = best[sig];
			slot = std::max(slot, p);
		}
	}
	std::vector<double> values;
	values.reserve(best.size());
	for (const auto &kv : best)
		values.push_back(kv.second);
	std::sort(values.begin(), values.end());
	double s = 0.0;
	for (double v : values)
		s += v;
	return s;
}

} // namespace

double exact_posterior_vulnerability(const FlatFunction &f, const std::vector<double> &high_p1,
				     const std::vector<double> &low_p1)
{
	int bits = static_cast<int>(f.high.size() + f.low.size());
	if (bits > kOracleMaxBits)
		throw TooLarge(bits, kOracleMaxBits);
	if (high_p1.size() != f.high.size())
		throw ArityMismatch(f.high.size(), high_p1.size());
	if (low_p1.size() != f.low.size())
		throw ArityMismatch(f.low.size(), low_p1.size());

	std::uint64_t lows = std::uint64_t{1} << f.low.size();
	std::vector<double> per_l(lows, 0.0);
	unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(worker_threads(), lows));
	auto work = [&](unsigned t) {
		for (std::uint64_t l = t; l < lows; l += threads) {
			double pl = 1.0;
			for (std::size_t i = 0; i < f.low.size(); ++i)
				pl *= ((l >> i) & 1) ? low_p1[i] : 1.0 - low_p1[i];
			per_l[l] = pl == 0.0 ? 0.0 : pl * best_guesses(f, high_p1, l);
		}
	};
	if (threads <= 1) {
		work(0);
	} else {
		std::vector<std::thread> pool;
		for (unsigned t = 0; t < threads; ++t)
			pool.emplace_back(work, t);
		for (std::thread &th : pool)
			th.join();
	}
	double v = 0.0;
	for (double x : per_l)
		v += x;
	return v;
}

MultiplicativeLeakage exact_multiplicative_leakage(const FlatFunction &f, const std::vector<double> &high_p1,
						   const std::vector<double> &low_p1)
{
	double prior = exact_prior_vulnerability(high_p1);
	double post = exact_posterior_vulnerability(f, high_p1, low_p1);
	MultiplicativeLeakage m;
	m.ratio = std::max(1.0, post / prior);
	m.bits = std::log2(m.ratio);
	return m;
}

std::string random_circuit(std::uint64_t seed, const RandomCircuitOptions &options)
{
	std::mt19937_64 rng(seed);
	auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
	auto chance = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };

	int n_high = uniform(1, std::min(6, options.max_bits));
	int n_low = uniform(0, std::min(6, options.max_bits - n_high));
	int n_gates = uniform(options.min_gates, options.max_gates);
	int n_out = uniform(1, 3);

	std::vector<std::string> pool;
	for (int i = 0; i < n_high; ++i)
		pool.push_back("h[" + std::to_string(i) + "]");
	for (int i = 0; i < n_low; ++i)
		pool.push_back("l[" + std::to_string(i) + "]");
	auto pick = [&]() { return pool[uniform(0, static_cast<int>(pool.size()) - 1)]; };

	std::ostringstream body;
	int n_regs = 0;
	for (int g = 0; g < n_gates; ++g) {
		std::string expr;
		switch (uniform(0, 4)) {
		case 0:
			expr = pick() + " & " + pick();
			break;
		case 1:
			expr = pick() + " | " + pick();
			break;
		case 2:
			expr = pick() + " ^ " + pick();
			break;
		case 3:
			expr = "~" + pick();
			break;
		default:
			expr = pick() + " ? " + pick() + " : " + pick();
		}
		std::string name = "w" + std::to_string(g);
		body << "\twire " << name << " = " << expr << ";\n";
		if (chance(options.register_probability)) {
			std::string reg = "r" + std::to_string(n_regs++);
			body << "\treg " << reg << ";\n\talways @(posedge clk) " << reg << " <= " << name << ";\n";
			pool.push_back(reg);
		} else {
			pool.push_back(name);
		}
	}

	std::ostringstream v;
	v << "module rc(\n\tinput clk,\n\tinput [" << n_high - 1 << ":0] h, // qflow: high\n";
	if (n_low > 0)
		v << "\tinput [" << n_low - 1 << ":0] l,\n";
	v << "\toutput [" << n_out - 1 << ":0] o\n);\n" << body.str();
	// Each output taps one of the three newest signals.
	for (int i = 0; i < n_out; ++i) {
		int from = std::max(0, static_cast<int>(pool.size()) - 1 - uniform(0, 2));
		v << "\tassign o[" << i << "] = " << pool[from] << ";\n";
	}
	v << "endmodule\n";
	return v.str();
}

} // namespace qflow
