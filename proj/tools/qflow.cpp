/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/errors.hpp"
#include "qflow/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

// Exit codes above the classification range.
constexpr int kExitInputError = 3;
constexpr int kExitInternalError = 4;

struct CommonOptions
{
	std::string top;
	std::vector<std::string> high;
	std::string probs_file;
	double p_high = -1.0;
	int max_channel_inputs = 5;
	bool no_cap = false;
	std::vector<std::string> files;
};

void add_common(CLI::App *cmd, CommonOptions &o)
{
	cmd->add_option("--top", o.top, "Top module")->required();
	cmd->add_option("--high", o.high, "Inputs to mark High (flat names, comma separated)")->delimiter(',');
	auto *probs = cmd->add_option("--probs", o.probs_file, "Probability file (net[index] = p1 per line)");
	cmd->add_option("--p-high", o.p_high, "Probability of every secret bit being 1")
	    ->check(CLI::Range(0.0, 1.0))
	    ->excludes(probs);
	cmd->add_option("--max-channel-inputs", o.max_channel_inputs, "Merge bound on channel inputs")
	    ->check(CLI::Range(1, 16));
	cmd->add_flag("--no-cap", o.no_cap, "Do not clamp per-bit totals to the source min-entropy");
	cmd->add_option("files", o.files, "Verilog sources")->required()->check(CLI::ExistingFile);
}

std::string read_file(const std::string &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw qflow::ConfigError("cannot read '" + path + "'");
	std::ostringstream s;
	s << in.rdbuf();
	return s.str();
}

void write_file(const std::string &path, const std::string &text)
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw qflow::ConfigError("cannot write '" + path + "'");
	out << text;
}

qflow::AnalysisConfig make_config(const CommonOptions &o)
{
	qflow::AnalysisConfig c;
	c.top = o.top;
	c.high = o.high;
	if (!o.probs_file.empty())
		c.probabilities = read_file(o.probs_file);
	if (o.p_high >= 0.0)
		c.p_high = o.p_high;
	c.max_channel_inputs = o.max_channel_inputs;
	c.cap = !o.no_cap;
	return c;
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"qflow: quantitative information flow analysis for Verilog designs"};
	app.require_subcommand(1);

	CommonOptions analyze_opts;
	std::string format = "text";
	std::string dump_trees, dump_channels;
	double warn = qflow::Thresholds{}.warn, detect = qflow::Thresholds{}.detect;
	auto *analyze = app.add_subcommand("analyze", "Quantify leakage of High inputs to the outputs");
	add_common(analyze, analyze_opts);
	analyze->add_option("--warn", warn, "Warning threshold in bits");
	analyze->add_option("--detect", detect, "Detection threshold in bits");
	analyze->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json", "csv"}));
	analyze->add_option("--dump-trees", dump_trees, "Write bind trees as S-expressions");
	analyze->add_option("--dump-channels", dump_channels, "Write the merged channel list");

	CommonOptions calibrate_opts;
	bool sweep = false;
	auto *calibrate = app.add_subcommand("calibrate", "Derive thresholds from a fully diffusing reference design");
	add_common(calibrate, calibrate_opts);
	calibrate->add_flag("--sweep", sweep, "Report min and mean for max_channel_inputs 1..5");

	std::uint64_t seed = 42;
	int count = 200, max_bits = 12, diff_max_inputs = 5, unroll = 8;
	bool verbose = false;
	auto *diff = app.add_subcommand("oracle-diff", "Compare QModel totals with exact leakage on random circuits");
	diff->add_option("--seed", seed, "Generator seed");
	diff->add_option("--count", count, "Number of circuits")->check(CLI::PositiveNumber);
	diff->add_option("--max-bits", max_bits, "Input bits per circuit")->check(CLI::Range(1, qflow::kOracleMaxBits));
	diff->add_option("--max-channel-inputs", diff_max_inputs, "Merge bound")->check(CLI::Range(1, 16));
	diff->add_option("--unroll", unroll, "Clock cycles observed by the exact adversary")->check(CLI::PositiveNumber);
	diff->add_flag("--verbose", verbose, "Print the Verilog of violating circuits");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		int code = app.exit(e);
		return code == 0 ? 0 : kExitInputError;
	}

	try {
		if (analyze->parsed()) {
			qflow::AnalysisConfig config = make_config(analyze_opts);
			config.thresholds = qflow::Thresholds{warn, detect};
			auto result = qflow::analyze(qflow::load_sources(analyze_opts.files, config.top), config);
			if (!dump_trees.empty())
				write_file(dump_trees, result->forest.dump());
			if (!dump_channels.empty())
				write_file(dump_channels, qflow::dump_channels(result->channels, result->forest));
			std::cout << qflow::render(result->report, qflow::parse_format(format));
			if (result->report.count(qflow::LeakClass::Leak) > 0)
				return 2;
			if (result->report.count(qflow::LeakClass::Warn) > 0)
				return 1;
			return 0;
		}
		if (calibrate->parsed()) {
			qflow::AnalysisConfig config = make_config(calibrate_opts);
			auto unit = qflow::load_sources(calibrate_opts.files, config.top);
			if (sweep) {
				std::printf("%-18s  %-14s  %-14s\n", "max_channel_inputs", "min", "mean");
				for (const qflow::SweepRow &row : qflow::calibrate_sweep(unit, config))
					std::printf("%-18d  %-14.9g  %-14.9g\n", row.max_channel_inputs, row.min, row.mean);
			} else {
				qflow::Thresholds t = qflow::calibrate_thresholds(unit, config);
				std::printf("warn %.9g\ndetect %.9g\n", t.warn, t.detect);
			}
			return 0;
		}
		if (diff->parsed()) {
			auto cases = qflow::oracle_diff(seed, count, max_bits, diff_max_inputs, unroll);
			int violations = 0;
			std::printf("%5s  %5s  %5s  %12s  %12s  %s\n", "case", "high", "low", "exact_bits", "qmodel_bits",
				    "dominated");
			for (const qflow::OracleDiffCase &c : cases) {
				std::printf("%5d  %5d  %5d  %12.6f  %12.6f  %s\n", c.index, c.high_bits, c.low_bits, c.exact_bits,
					    c.qmodel_bits, c.dominated ? "yes" : "NO");
				if (!c.dominated) {
					++violations;
					if (verbose)
						std::printf("%s", c.verilog.c_str());
				}
			}
			std::printf("%d of %zu circuits violate exact <= QModel\n", violations, cases.size());
			return violations == 0 ? 0 : 1;
		}
	} catch (const qflow::Error &e) {
		std::cerr << "qflow: " << e.what() << "\n";
		return kExitInputError;
	} catch (const std::exception &e) {
		std::cerr << "qflow: internal error: " << e.what() << "\n";
		return kExitInternalError;
	}
	return kExitInputError;
}
