/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/frontend/ast.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qflow::frontend {

/**
 * Security labels before flattening.
 *
 * In-source markers attach to a module's input port and therefore to every
 * instance of it. Overrides use flat hierarchical names (`key`, `Trojan.key`)
 * and win over markers. Anything not labeled is Low; top outputs are the
 * observation targets.
 */
struct SecurityLabelMap
{
	std::string top;
	std::map<std::pair<std::string, std::string>, Label> annotations;
	std::map<std::string, Label> overrides;
	/// Effective label of every top-module input port.
	std::map<std::string, Label> top_port_labels;

	/// Label of the input port `port` of an instance of `module` whose flat name is `flat_name`.
	Label resolve(const std::string &module, const std::string &port, const std::string &flat_name) const;
};

SecurityLabelMap extract_labels(const Ast &ast, const std::string &top,
				const std::vector<std::pair<std::string, Label>> &overrides = {});

} // namespace qflow::frontend
