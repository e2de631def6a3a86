/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qflow {

struct Location
{
	std::string file;
	int line = 0;
	int col = 0;

	std::string str() const;
};

/// Base of every error raised by the analyzer. The CLI maps these to exit codes > 2.
class Error : public std::runtime_error
{
      public:
	using std::runtime_error::runtime_error;
};

class SyntaxError : public Error
{
      public:
	SyntaxError(Location loc, const std::string &message);
	const Location &location() const { return loc_; }

      private:
	Location loc_;
};

class UnsupportedConstruct : public Error
{
      public:
	UnsupportedConstruct(const std::string &construct, Location loc);
	const std::string &construct() const { return construct_; }
	const Location &location() const { return loc_; }

      private:
	std::string construct_;
	Location loc_;
};

class UnknownSignal : public Error
{
      public:
	explicit UnknownSignal(const std::string &name, const std::string &context = {});
};

class LabelOnNonInput : public Error
{
      public:
	explicit LabelOnNonInput(const std::string &name);
};

class RecursiveInstantiation : public Error
{
      public:
	explicit RecursiveInstantiation(const std::vector<std::string> &cycle);
};

class NonConstantGenerateBound : public Error
{
      public:
	explicit NonConstantGenerateBound(const Location &loc);
};

class WidthMismatch : public Error
{
      public:
	WidthMismatch(const Location &loc, const std::string &detail);
};

/// Undeclared modules, multiple drivers, multiple clocks and similar structural problems.
class ElaborationError : public Error
{
      public:
	ElaborationError(const Location &loc, const std::string &detail);
};

class CombinationalLoop : public Error
{
      public:
	explicit CombinationalLoop(const std::vector<std::string> &cycle);
};

class UnassignedNet : public Error
{
      public:
	explicit UnassignedNet(const std::string &net);
};

class ArityMismatch : public Error
{
      public:
	ArityMismatch(std::size_t expected, std::size_t got);
};

class NonConvergentFixpoint : public Error
{
      public:
	explicit NonConvergentFixpoint(const std::vector<std::string> &registers);
};

class TooLarge : public Error
{
      public:
	TooLarge(int bits, int limit);
};

class ConfigError : public Error
{
      public:
	using Error::Error;
};

} // namespace qflow
