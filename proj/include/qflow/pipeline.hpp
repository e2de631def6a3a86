/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/bitgraph.hpp"
#include "qflow/channelizer.hpp"
#include "qflow/frontend/elaborate.hpp"
#include "qflow/oracle.hpp"
#include "qflow/qif_engine.hpp"
#include "qflow/report.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qflow {

struct AnalysisConfig
{
	std::string top;
	/// Flat input names forced High on top of in-source markers.
	std::vector<std::string> high;
	/// Contents of a probability file.
	std::optional<std::string> probabilities;
	/// One p1 for every secret bit.
	std::optional<double> p_high;
	int max_channel_inputs = 5;
	Thresholds thresholds;
	bool cap = true;
	BitBlastOptions blast;
	EngineOptions engine;

	/// Errors: ConfigError.
	void validate() const;
};

/// Every stage of one analysis. Later stages point into earlier ones, so the result is pinned.
struct AnalysisResult
{
	AnalysisResult() = default;
	AnalysisResult(const AnalysisResult &) = delete;
	AnalysisResult &operator=(const AnalysisResult &) = delete;

	frontend::ElaboratedDesign design;
	Forest forest;
	DependencyGraph deps;
	ChannelGraph channels;
	ProbAnnotatedGraph annotated;
	LeakageTotals totals;
	Report report;
};

/// Reads files into a SourceUnit. Errors: ConfigError when a file cannot be read.
frontend::SourceUnit load_sources(const std::vector<std::string> &paths, const std::string &top);

/**
 * Probability file: `net[index] = p1` or `net = p1` per line, `#` comments.
 * Names are top-level inputs. Errors: ConfigError, UnknownSignal.
 */
InputProbabilities parse_probabilities(const std::string &text, const frontend::ElaboratedDesign &design);

/// parse -> labels -> elaborate -> bit_blast -> dependencies -> merge -> probabilities -> leakage -> totals -> classify.
std::unique_ptr<AnalysisResult> analyze(const frontend::SourceUnit &source, const AnalysisConfig &config);

Thresholds calibrate_thresholds(const frontend::SourceUnit &source, const AnalysisConfig &config);

struct SweepRow
{
	int max_channel_inputs = 0;
	double min = 0.0;
	double mean = 0.0;
};

std::vector<SweepRow> calibrate_sweep(const frontend::SourceUnit &source, const AnalysisConfig &config, int from = 1,
				      int to = 5);

struct OracleDiffCase
{
	int index = 0;
	std::uint64_t seed = 0;
	std::string verilog;
	int high_bits = 0;
	int low_bits = 0;
	double exact_bits = 0.0;
	double qmodel_bits = 0.0;
	bool dominated = true;
};

/// Tolerance on exact <= QModel.
constexpr double kDominationTolerance = 1e-9;

/// Random circuits from `seed`; each is analyzed and compared with the exact leakage.
std::vector<OracleDiffCase> oracle_diff(std::uint64_t seed, int count, int max_bits, int max_channel_inputs = 5,
					int unroll = 8);

/// Exact leakage of a whole analyzed design, with the probabilities used by the analysis.
MultiplicativeLeakage exact_design_leakage(const AnalysisResult &result, int unroll = 8);

} // namespace qflow
