/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/pipeline.hpp"

#include "qflow/errors.hpp"
#include "qflow/frontend/labels.hpp"
#include "qflow/frontend/parser.hpp"
#include "qflow/oracle.hpp"

#include <chrono>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

namespace qflow {

void AnalysisConfig::validate() const
{
	if (top.empty())
		throw ConfigError("no top module given");
	if (max_channel_inputs < 1 || max_channel_inputs > 16)
		throw ConfigError("max_channel_inputs must be in [1, 16], got " + std::to_string(max_channel_inputs));
	if (probabilities && p_high)
		throw ConfigError("a probability file and a global high probability are mutually exclusive");
	if (p_high && !(*p_high >= 0.0 && *p_high <= 1.0))
		throw ConfigError("probability must be in [0, 1]");
	thresholds.validate();
}

frontend::SourceUnit load_sources(const std::vector<std::string> &paths, const std::string &top)
{
	if (paths.empty())
		throw ConfigError("no Verilog files given");
	frontend::SourceUnit unit;
	unit.top_module = top;
	for (const std::string &path : paths) {
		std::ifstream in(path, std::ios::binary);
		if (!in)
			throw ConfigError("cannot read '" + path + "'");
		std::ostringstream text;
		text << in.rdbuf();
		unit.files.push_back({path, text.str()});
	}
	return unit;
}

InputProbabilities parse_probabilities(const std::string &text, const frontend::ElaboratedDesign &design)
{
	static const std::regex line_re(R"(^\s*([A-Za-z_][\w$.]*)\s*(?:\[\s*(-?\d+)\s*\])?\s*=\s*(\S+)\s*$)");
	InputProbabilities probs;
	std::istringstream in(text);
	std::string line;
	for (int number = 1; std::getline(in, line); ++number) {
		if (auto hash = line.find('#'); hash != std::string::npos)
			line.erase(hash);
		if (line.find_first_not_of(" \t\r") == std::string::npos)
			continue;
		if (!line.empty() && line.back() == '\r')
			line.pop_back();
		std::smatch m;
		if (!std::regex_match(line, m, line_re))
			throw ConfigError("probability file line " + std::to_string(number) + ": expected 'net[index] = p'");
		double p;
		try {
			std::size_t used = 0;
			p = std::stod(m[3].str(), &used);
			if (used != m[3].str().size())
				throw std::invalid_argument("trailing text");
		} catch (const std::exception &) {
			throw ConfigError("probability file line " + std::to_string(number) + ": '" + m[3].str() +
					  "' is not a number");
		}
		if (!(p >= 0.0 && p <= 1.0))
			throw ConfigError("probability file line " + std::to_string(number) + ": " + m[3].str() +
					  " is outside [0, 1]");
		auto net = design.find_net(m[1].str());
		if (!net || design.nets[*net].kind != frontend::NetKind::Input || !design.nets[*net].top_port)
			throw UnknownSignal(m[1].str(), "probability file line " + std::to_string(number));
		const frontend::Net &n = design.nets[*net];
		if (m[2].matched) {
			auto off = n.offset_of(std::stoll(m[2].str()));
			if (!off)
				throw ConfigError("probability file line " + std::to_string(number) + ": index out of range for " +
						  n.name);
			probs.bits[BitRef{*net, *off}] = p;
		} else {
			for (int b = 0; b < n.width; ++b)
				probs.bits[BitRef{*net, b}] = p;
		}
	}
	return probs;
}

std::unique_ptr<AnalysisResult> analyze(const frontend::SourceUnit &source, const AnalysisConfig &config)
{
	config.validate();
	auto start = std::chrono::steady_clock::now();
	auto r = std::make_unique<AnalysisResult>();

	frontend::Ast ast = frontend::parse(source);
	std::vector<std::pair<std::string, frontend::Label>> overrides;
	for (const std::string &name : config.high)
		overrides.push_back({name, frontend::Label::High});
	frontend::SecurityLabelMap labels = frontend::extract_labels(ast, config.top, overrides);
	r->design = frontend::elaborate(ast, config.top, labels);
	r->forest = bit_blast(r->design, config.blast);
	r->deps = compute_dependencies(r->forest);
	r->channels = merge(r->forest, r->deps, config.max_channel_inputs);

	InputProbabilities probs;
	if (config.probabilities)
		probs = parse_probabilities(*config.probabilities, r->design);
	if (config.p_high)
		for (const BitRef &bit : r->forest.high_bits)
			probs.bits[bit] = *config.p_high;

	EngineOptions engine = config.engine;
	engine.cap = config.cap;
	r->annotated = propagate_probabilities(r->forest, r->channels, r->deps, probs, engine);
	propagate_leakage(r->annotated, engine);
	r->totals = accumulate_totals(r->annotated, config.cap);
	r->report = classify(r->totals, r->forest, config.thresholds,
			     DesignInfo{config.top, config.max_channel_inputs, config.cap});
	r->report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
	return r;
}

Thresholds calibrate_thresholds(const frontend::SourceUnit &source, const AnalysisConfig &config)
{
	return calibrate_from_totals(analyze(source, config)->totals);
}

std::vector<SweepRow> calibrate_sweep(const frontend::SourceUnit &source, const AnalysisConfig &config, int from, int to)
{
	std::vector<SweepRow> rows;
	for (int m = from; m <= to; ++m) {
		AnalysisConfig c = config;
		c.max_channel_inputs = m;
		Thresholds t = calibrate_thresholds(source, c);
		rows.push_back(SweepRow{m, t.warn, t.detect});
	}
	return rows;
}

MultiplicativeLeakage exact_design_leakage(const AnalysisResult &result, int unroll)
{
	FlatFunction f = flatten(result.forest, unroll);
	std::vector<double> hp, lp;
	for (const BitRef &b : f.high)
		hp.push_back(result.annotated.probs.get(b));
	for (const BitRef &b : f.low)
		lp.push_back(result.annotated.probs.get(b));
	return exact_multiplicative_leakage(f, hp, lp);
}

std::vector<OracleDiffCase> oracle_diff(std::uint64_t seed, int count, int max_bits, int max_channel_inputs, int unroll)
{
	if (max_bits < 1 || max_bits > kOracleMaxBits)
		throw ConfigError("max_bits must be in [1, " + std::to_string(kOracleMaxBits) + "]");
	std::mt19937_64 master(seed);
	RandomCircuitOptions options;
	options.max_bits = max_bits;
	std::vector<OracleDiffCase> cases;
	for (int i = 0; i < count; ++i) {
		OracleDiffCase c;
		c.index = i;
		c.seed = master();
		c.verilog = random_circuit(c.seed, options);
		frontend::SourceUnit unit;
		unit.files.push_back({"rc_" + std::to_string(i) + ".v", c.verilog});
		unit.top_module = "rc";
		AnalysisConfig config;
		config.top = "rc";
		config.max_channel_inputs = max_channel_inputs;
		auto result = analyze(unit, config);
		FlatFunction f = flatten(result->forest, unroll);
		c.high_bits = static_cast<int>(result->forest.high_bits.size());
		c.low_bits = static_cast<int>(f.low.size());
		c.exact_bits = exact_design_leakage(*result, unroll).bits;
		c.qmodel_bits = result->totals.sum();
		c.dominated = c.exact_bits <= c.qmodel_bits + kDominationTolerance;
		cases.push_back(std::move(c));
	}
	return cases;
}

} // namespace qflow
