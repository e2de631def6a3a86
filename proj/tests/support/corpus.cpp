/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "support/corpus.hpp"

#include "qflow/frontend/labels.hpp"
#include "qflow/frontend/parser.hpp"
#include "qflow/pipeline.hpp"

namespace qflow::testing {

std::string corpus_path(const std::string &file)
{
	return std::string(QFLOW_CORPUS_DIR) + "/" + file;
}

frontend::SourceUnit corpus_unit(const std::vector<std::string> &files, const std::string &top)
{
	std::vector<std::string> paths;
	for (const auto &f : files)
		paths.push_back(corpus_path(f));
	return load_sources(paths, top);
}

frontend::SourceUnit inline_unit(const std::string &text, const std::string &top)
{
	frontend::SourceUnit unit;
	unit.files.push_back({"inline.v", text});
	unit.top_module = top;
	return unit;
}

frontend::ElaboratedDesign elaborate_unit(const frontend::SourceUnit &unit, const std::vector<std::string> &high)
{
	frontend::Ast ast = frontend::parse(unit);
	std::vector<std::pair<std::string, frontend::Label>> overrides;
	for (const auto &h : high)
		overrides.emplace_back(h, frontend::Label::High);
	auto labels = frontend::extract_labels(ast, unit.top_module, overrides);
	return frontend::elaborate(ast, unit.top_module, labels);
}

} // namespace qflow::testing
