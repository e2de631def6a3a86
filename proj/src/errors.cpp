/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/errors.hpp"

namespace qflow {

namespace {

std::string join(const std::vector<std::string> &parts, const char *sep)
{
	std::string out;
	for (size_t i = 0; i < parts.size(); ++i) {
		if (i)
			out += sep;
		out += parts[i];
	}
	return out;
}

} // namespace

std::string Location::str() const
{
	std::string out = file.empty() ? std::string("<input>") : file;
	if (line > 0)
		out += ":" + std::to_string(line) + ":" + std::to_string(col);
	return out;
}

SyntaxError::SyntaxError(Location loc, const std::string &message)
    : Error(loc.str() + ": syntax error: " + message), loc_(std::move(loc))
{
}

UnsupportedConstruct::UnsupportedConstruct(const std::string &construct, Location loc)
    : Error(loc.str() + ": unsupported construct: " + construct), construct_(construct), loc_(std::move(loc))
{
}

UnknownSignal::UnknownSignal(const std::string &name, const std::string &context)
    : Error("unknown signal '" + name + "'" + (context.empty() ? "" : " (" + context + ")"))
{
}

LabelOnNonInput::LabelOnNonInput(const std::string &name)
    : Error("security label on '" + name + "', which is not an input port of the top module")
{
}

RecursiveInstantiation::RecursiveInstantiation(const std::vector<std::string> &cycle)
    : Error("recursive instantiation: " + join(cycle, " -> "))
{
}

NonConstantGenerateBound::NonConstantGenerateBound(const Location &loc)
    : Error(loc.str() + ": generate loop bound is not a constant expression")
{
}

WidthMismatch::WidthMismatch(const Location &loc, const std::string &detail)
    : Error(loc.str() + ": width mismatch: " + detail)
{
}

ElaborationError::ElaborationError(const Location &loc, const std::string &detail) : Error(loc.str() + ": " + detail) {}

CombinationalLoop::CombinationalLoop(const std::vector<std::string> &cycle)
    : Error("combinational loop: " + join(cycle, " -> "))
{
}

UnassignedNet::UnassignedNet(const std::string &net) : Error("net '" + net + "' is read but never assigned") {}

ArityMismatch::ArityMismatch(std::size_t expected, std::size_t got)
    : Error("arity mismatch: channel has " + std::to_string(expected) + " inputs, assignment has " +
	    std::to_string(got))
{
}

NonConvergentFixpoint::NonConvergentFixpoint(const std::vector<std::string> &registers)
    : Error("sequential fixpoint did not converge over registers: " + join(registers, ", "))
{
}

TooLarge::TooLarge(int bits, int limit)
    : Error("exhaustive enumeration over " + std::to_string(bits) + " input bits exceeds the limit of " +
	    std::to_string(limit))
{
}

} // namespace qflow
