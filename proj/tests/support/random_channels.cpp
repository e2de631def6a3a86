/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "support/random_channels.hpp"

namespace qflow::testing {

double random_probability(std::mt19937_64 &rng)
{
	switch (rng() % 8) {
	case 0:
		return 0.0;
	case 1:
		return 1.0;
	case 2:
		return 0.5;
	default:
		return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
	}
}

Channel random_table_channel(std::mt19937_64 &rng, int arity)
{
	Channel ch;
	ch.inputs.resize(static_cast<std::size_t>(arity));
	std::uint64_t rows = 1ull << arity;
	std::uint64_t mask = rows == 64 ? ~0ull : (1ull << rows) - 1;
	ch.table = {rng() & mask};
	return ch;
}

ChannelInputs random_view(std::mt19937_64 &rng, const Channel &ch)
{
	ChannelInputs in;
	for (std::size_t i = 0; i < ch.arity(); ++i) {
		in.p1.push_back(random_probability(rng));
		in.high.push_back(rng() & 1);
	}
	return in;
}

Channel random_macro_channel(std::mt19937_64 &rng, MacroKind kind, int width, ChannelInputs &in, bool shared_slots)
{
	Channel ch;
	MacroDescriptor m{kind, width, std::vector<int>(2 * width, MacroDescriptor::kConst0)};
	bool high_a = rng() & 1;
	int next = 0;
	for (int side = 0; side < 2; ++side) {
		bool high_side = (side == 0) == high_a;
		for (int k = 0; k < width; ++k) {
			int slot = side * width + k;
			switch (rng() % 5) {
			case 0:
				m.slots[slot] = MacroDescriptor::kConst0;
				break;
			case 1:
				m.slots[slot] = MacroDescriptor::kConst1;
				break;
			default:
				if (shared_slots && next > 0 && rng() % 3 == 0) {
					m.slots[slot] = static_cast<int>(rng() % static_cast<std::uint64_t>(next));
					break;
				}
				m.slots[slot] = next++;
				in.high.push_back(high_side);
				in.p1.push_back(random_probability(rng));
			}
		}
	}
	ch.inputs.resize(static_cast<std::size_t>(next));
	ch.macro = m;
	ch.uniform_high_override = true;
	return ch;
}

BoolFunction as_function(const Channel &ch)
{
	return [&ch](const std::vector<bool> &x) { return channel_function_eval(ch, x); };
}

} // namespace qflow::testing
