/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/frontend/ast.hpp"
#include "qflow/frontend/elaborate.hpp"

#include <string>
#include <vector>

namespace qflow::testing {

std::string corpus_path(const std::string &file);
frontend::SourceUnit corpus_unit(const std::vector<std::string> &files, const std::string &top);
frontend::SourceUnit inline_unit(const std::string &text, const std::string &top);

/// parse, extract_labels and elaborate in one step.
frontend::ElaboratedDesign elaborate_unit(const frontend::SourceUnit &unit,
					  const std::vector<std::string> &high = {});

} // namespace qflow::testing
