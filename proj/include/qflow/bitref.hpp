/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace qflow {

/// One bit of a flat net; `bit` is the LSB-based offset, not the declared index.
struct BitRef
{
	std::int32_t net = -1;
	std::int32_t bit = 0;

	auto operator<=>(const BitRef &) const = default;
};

struct BitRefHash
{
	std::size_t operator()(const BitRef &b) const noexcept
	{
		return std::hash<std::uint64_t>()((static_cast<std::uint64_t>(static_cast<std::uint32_t>(b.net)) << 32) |
						  static_cast<std::uint32_t>(b.bit));
	}
};

} // namespace qflow
