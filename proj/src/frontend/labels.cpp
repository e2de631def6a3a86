/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/frontend/labels.hpp"

#include <sstream>

namespace qflow::frontend {

namespace {

const Instance *find_instance(const Module &m, const std::string &name)
{
	for (const ModuleItem &item : m.items)
		if (const auto *inst = std::get_if<Instance>(&item.node))
			if (inst->name == name)
				return inst;
	return nullptr;
}

bool declares(const Module &m, const std::string &name)
{
	for (const ModuleItem &item : m.items)
		if (const auto *decl = std::get_if<NetDecl>(&item.node))
			for (const std::string &n : decl->names)
				if (n == name)
					return true;
	return false;
}

// Walk `a.b.port` from the top module down to the owning module.
void check_override(const Ast &ast, const Module &top, const std::string &flat)
{
	std::vector<std::string> parts;
	std::stringstream ss(flat);
	for (std::string part; std::getline(ss, part, '.');)
		parts.push_back(part);
	const Module *m = &top;
	for (size_t i = 0; i + 1 < parts.size(); ++i) {
		const Instance *inst = find_instance(*m, parts[i]);
		if (!inst)
			throw UnknownSignal(flat, "no instance '" + parts[i] + "' in module '" + m->name + "'");
		m = ast.find(inst->module);
		if (!m)
			throw UnknownSignal(flat, "instance of undeclared module '" + inst->module + "'");
	}
	const std::string &port = parts.back();
	auto dir = m->port_direction(port);
	if (dir == PortDirection::Input)
		return;
	if (dir || declares(*m, port))
		throw LabelOnNonInput(flat);
	throw UnknownSignal(flat);
}

} // namespace

Label SecurityLabelMap::resolve(const std::string &module, const std::string &port, const std::string &flat_name) const
{
	if (auto it = overrides.find(flat_name); it != overrides.end())
		return it->second;
	if (auto it = annotations.find({module, port}); it != annotations.end())
		return it->second;
	return Label::Low;
}

SecurityLabelMap extract_labels(const Ast &ast, const std::string &top,
				const std::vector<std::pair<std::string, Label>> &overrides)
{
	const Module *top_module = ast.find(top);
	if (!top_module)
		throw Error("top module '" + top + "' is not declared");

	SecurityLabelMap labels;
	labels.top = top;
	for (const Module &m : ast.modules)
		for (const ModuleItem &item : m.items)
			if (const auto *decl = std::get_if<NetDecl>(&item.node))
				if (decl->high)
					for (const std::string &n : decl->names)
						labels.annotations[{m.name, n}] = Label::High;

	for (const auto &[name, label] : overrides) {
		check_override(ast, *top_module, name);
		labels.overrides[name] = label;
	}

	for (const std::string &port : top_module->ports)
		if (top_module->port_direction(port) == PortDirection::Input)
			labels.top_port_labels[port] = labels.resolve(top, port, port);
	return labels;
}

} // namespace qflow::frontend
