/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/frontend/ast.hpp"

namespace qflow::frontend {

/**
 * Parse every file of the unit into one Ast.
 *
 * Accepted subset: Verilog-2005 modules with ANSI or non-ANSI ports, wire/reg
 * declarations, parameters, continuous assigns, `always @(*)` and
 * `always @(posedge clk)` blocks with blocking/nonblocking assignments, if/else
 * and case, generate-for, and module instances. Anything else raises
 * UnsupportedConstruct. High markers: `(* qflow_high *)`, a trailing
 * `// qflow: high` comment, or a leading `High` token before `input`.
 */
Ast parse(const SourceUnit &source);

/// Convert a literal spelling (`8'hff`, `'b1`, `42`, `0b1`) to bits.
Literal parse_number(const std::string &text, const Location &loc);

} // namespace qflow::frontend
