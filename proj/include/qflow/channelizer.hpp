/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/bitgraph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qflow {

enum class InputLabel
{
	High,
	Low,
	Derived,
};

/**
 * One channel input. Primary inputs carry their bit. Derived inputs name the
 * upstream channel; when they cross a register the bit is the register bit,
 * otherwise bit.net is -1.
 */
struct ChannelInput
{
	InputLabel label = InputLabel::Low;
	BitRef bit;
	int source = -1;

	bool crosses_register() const { return label == InputLabel::Derived && bit.net >= 0; }
};

/// Operand layout of a macro channel: slot i < width is a[i], the rest are b.
struct MacroDescriptor
{
	static constexpr int kConst0 = -1;
	static constexpr int kConst1 = -2;

	MacroKind kind = MacroKind::Add;
	int width = 0;
	/// 2 * width entries: an input index or kConst0 / kConst1.
	std::vector<int> slots;
};

struct Channel
{
	int id = -1;
	std::vector<ChannelInput> inputs;
	/// Truth table; row r assigns input i the value of bit i of r. Empty for macros.
	std::vector<std::uint64_t> table;
	std::optional<MacroDescriptor> macro;
	NodeId node = -1;
	/// Root index whose tree produced this channel.
	int owner = -1;
	/// Root index when the channel computes the root bit itself.
	int root = -1;
	bool uniform_high_override = false;

	std::size_t arity() const { return inputs.size(); }
	/// Output for the input assignment encoded as a row index.
	bool row(std::uint64_t assignment) const;
};

struct ChannelGraph
{
	int max_channel_inputs = 5;
	std::vector<Channel> channels;
	/// Channel of each root, indexed like Forest::roots.
	std::vector<int> root_channel;
	/// Channels built for each root, inputs before consumers.
	std::vector<std::vector<int>> root_channels;
};

/// Errors: ConfigError when max_channel_inputs is outside [1, 16].
ChannelGraph merge(const Forest &forest, const DependencyGraph &deps, int max_channel_inputs);

/// Errors: ArityMismatch.
bool channel_function_eval(const Channel &channel, const std::vector<bool> &assignment);

/// One line per channel: id, owner root, inputs with labels, hex truth table or macro layout.
std::string dump_channels(const ChannelGraph &graph, const Forest &forest);

/// Bitsliced pattern of input `index` over rows [64 * word, 64 * word + 64).
std::uint64_t input_pattern(int index, std::size_t word);

} // namespace qflow
