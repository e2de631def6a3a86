/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/bitgraph.hpp"
#include "qflow/qif_engine.hpp"

#include <string>
#include <vector>

namespace qflow {

/// Leakage cutoffs in bits; both comparisons are strict.
struct Thresholds
{
	double warn = 2.89154e-3;
	double detect = 1.53939e-2;

	/// Errors: ConfigError unless 0 <= warn <= detect.
	void validate() const;
};

enum class LeakClass
{
	Ok,
	Warn,
	Leak,
};

const char *class_name(LeakClass c);
LeakClass parse_class(const std::string &name);
LeakClass classify_value(double total, const Thresholds &t);

struct PathEntry
{
	std::string output_net;
	int output_bit = 0;
	double leakage_bits = 0.0;

	bool operator==(const PathEntry &) const = default;
};

struct SecretEntry
{
	std::string net;
	/// Declared index within `net`.
	int bit = 0;
	double leakage_bits = 0.0;
	LeakClass cls = LeakClass::Ok;
	/// Output bits reached, largest contribution first.
	std::vector<PathEntry> paths;

	bool operator==(const SecretEntry &) const = default;
};

struct DesignInfo
{
	std::string top;
	int max_channel_inputs = 5;
	bool cap = true;

	bool operator==(const DesignInfo &) const = default;
};

struct Report
{
	static constexpr int kSchema = 1;

	DesignInfo design;
	Thresholds thresholds;
	/// One entry per secret bit, in secret-bit id order.
	std::vector<SecretEntry> secrets;
	double runtime_seconds = 0.0;

	std::size_t count(LeakClass c) const;
	double total() const;
};

Report classify(const LeakageTotals &totals, const Forest &forest, const Thresholds &t, const DesignInfo &design);

enum class Format
{
	Text,
	Json,
	Csv,
};

Format parse_format(const std::string &name);
std::string render(const Report &report, Format format);
/// Inverse of render(report, Format::Json). Errors: ConfigError on malformed input.
Report parse_json_report(const std::string &text);

/// warn = minimum and detect = mean of the per-bit totals. Errors: ConfigError below two secret bits.
Thresholds calibrate_from_totals(const LeakageTotals &totals);

} // namespace qflow
