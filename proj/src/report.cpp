/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "qflow/report.hpp"

#include "qflow/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace qflow {

void Thresholds::validate() const
{
	if (!(warn >= 0.0 && warn <= detect))
		throw ConfigError("thresholds must satisfy 0 <= warn <= detect");
}

const char *class_name(LeakClass c)
{
	switch (c) {
	case LeakClass::Ok:
		return "ok";
	case LeakClass::Warn:
		return "warn";
	case LeakClass::Leak:
		return "leak";
	}
	return "ok";
}

LeakClass parse_class(const std::string &name)
{
	if (name == "ok")
		return LeakClass::Ok;
	if (name == "warn")
		return LeakClass::Warn;
	if (name == "leak")
		return LeakClass::Leak;
	throw ConfigError("unknown class '" + name + "'");
}

LeakClass classify_value(double total, const Thresholds &t)
{
	if (total > t.detect)
		return LeakClass::Leak;
	if (total > t.warn)
		return LeakClass::Warn;
	return LeakClass::Ok;
}

std::size_t Report::count(LeakClass c) const
{
	return static_cast<std::size_t>(
	    std::count_if(secrets.begin(), secrets.end(), [c](const SecretEntry &s) { return s.cls == c; }));
}

double Report::total() const
{
	double s = 0.0;
	for (const SecretEntry &e : secrets)
		s += e.leakage_bits;
	return s;
}

Report classify(const LeakageTotals &totals, const Forest &forest, const Thresholds &t, const DesignInfo &design)
{
	t.validate();
	Report r;
	r.design = design;
	r.thresholds = t;
	for (const SecretTotal &s : totals.secrets) {
		const frontend::Net &net = forest.nets.at(s.bit.net);
		SecretEntry e;
		e.net = net.name;
		e.bit = net.index_of(s.bit.bit);
		e.leakage_bits = s.total;
		e.cls = classify_value(s.total, t);
		for (const PathLeakage &p : s.paths) {
			const BitRef &out = forest.roots[p.root].bit;
			const frontend::Net &on = forest.nets.at(out.net);
			e.paths.push_back(PathEntry{on.name, on.index_of(out.bit), p.leakage});
		}
		std::stable_sort(e.paths.begin(), e.paths.end(),
				 [](const PathEntry &a, const PathEntry &b) { return a.leakage_bits > b.leakage_bits; });
		r.secrets.push_back(std::move(e));
	}
	return r;
}

Format parse_format(const std::string &name)
{
	if (name == "text")
		return Format::Text;
	if (name == "json")
		return Format::Json;
	if (name == "csv")
		return Format::Csv;
	throw ConfigError("unknown format '" + name + "' (expected text, json or csv)");
}

namespace {

std::string fmt(const char *spec, double v)
{
	char buf[64];
	std::snprintf(buf, sizeof buf, spec, v);
	return buf;
}

std::string bit_label(const std::string &net, int bit) { return net + "[" + std::to_string(bit) + "]"; }

std::string render_text(const Report &r)
{
	std::ostringstream out;
	out << "top " << r.design.top << ", max_channel_inputs " << r.design.max_channel_inputs << ", cap "
	    << (r.design.cap ? "on" : "off") << "\n";
	out << "thresholds: warn " << fmt("%g", r.thresholds.warn) << ", detect " << fmt("%g", r.thresholds.detect)
	    << "\n\n";
	std::size_t width = 6;
	for (const SecretEntry &e : r.secrets)
		width = std::max(width, bit_label(e.net, e.bit).size());
	char line[256];
	std::snprintf(line, sizeof line, "%-*s  %14s  %-5s  %s\n", static_cast<int>(width), "secret", "leakage_bits",
		      "class", "paths");
	out << line;
	for (const SecretEntry &e : r.secrets) {
		std::string paths;
		for (std::size_t i = 0; i < e.paths.size() && i < 3; ++i)
			paths += (i ? ", " : "") + bit_label(e.paths[i].output_net, e.paths[i].output_bit) + " " +
				 fmt("%.6g", e.paths[i].leakage_bits);
		if (e.paths.size() > 3)
			paths += ", +" + std::to_string(e.paths.size() - 3) + " more";
		std::snprintf(line, sizeof line, "%-*s  %14.9f  %-5s  ", static_cast<int>(width),
			      bit_label(e.net, e.bit).c_str(), e.leakage_bits, class_name(e.cls));
		out << line << paths << "\n";
	}
	out << "\n"
	    << r.count(LeakClass::Leak) << " leak, " << r.count(LeakClass::Warn) << " warn, " << r.count(LeakClass::Ok)
	    << " ok; total " << fmt("%.6f", r.total()) << " bits; " << fmt("%.3f", r.runtime_seconds) << " s\n";
	return out.str();
}

std::string render_json(const Report &r)
{
	using nlohmann::ordered_json;
	ordered_json j;
	j["schema"] = Report::kSchema;
	j["design"] = {{"top", r.design.top}, {"max_channel_inputs", r.design.max_channel_inputs}, {"cap", r.design.cap}};
	j["thresholds"] = {{"warn", r.thresholds.warn}, {"detect", r.thresholds.detect}};
	j["secrets"] = ordered_json::array();
	for (const SecretEntry &e : r.secrets) {
		ordered_json s;
		s["net"] = e.net;
		s["bit"] = e.bit;
		s["leakage_bits"] = e.leakage_bits;
		s["class"] = class_name(e.cls);
		s["paths"] = ordered_json::array();
		for (const PathEntry &p : e.paths)
			s["paths"].push_back(
			    {{"output_net", p.output_net}, {"output_bit", p.output_bit}, {"leakage_bits", p.leakage_bits}});
		j["secrets"].push_back(std::move(s));
	}
	j["runtime_seconds"] = r.runtime_seconds;
	return j.dump(2) + "\n";
}

std::string render_csv(const Report &r)
{
	std::string out = "secret_bit_index,leakage_bits\n";
	for (std::size_t i = 0; i < r.secrets.size(); ++i)
		out += std::to_string(i) + "," + fmt("%.17g", r.secrets[i].leakage_bits) + "\n";
	return out;
}

} // namespace

std::string render(const Report &report, Format format)
{
	switch (format) {
	case Format::Text:
		return render_text(report);
	case Format::Json:
		return render_json(report);
	case Format::Csv:
		return render_csv(report);
	}
	return {};
}

Report parse_json_report(const std::string &text)
{
	try {
		nlohmann::json j = nlohmann::json::parse(text);
		if (j.at("schema").get<int>() != Report::kSchema)
			throw ConfigError("unsupported report schema " + j.at("schema").dump());
		Report r;
		r.design.top = j.at("design").at("top").get<std::string>();
		r.design.max_channel_inputs = j.at("design").at("max_channel_inputs").get<int>();
		r.design.cap = j.at("design").at("cap").get<bool>();
		r.thresholds.warn = j.at("thresholds").at("warn").get<double>();
		r.thresholds.detect = j.at("thresholds").at("detect").get<double>();
		for (const auto &s : j.at("secrets")) {
			SecretEntry e;
			e.net = s.at("net").get<std::string>();
			e.bit = s.at("bit").get<int>();
			e.leakage_bits = s.at("leakage_bits").get<double>();
			e.cls = parse_class(s.at("class").get<std::string>());
			for (const auto &p : s.at("paths"))
				e.paths.push_back(PathEntry{p.at("output_net").get<std::string>(), p.at("output_bit").get<int>(),
							    p.at("leakage_bits").get<double>()});
			r.secrets.push_back(std::move(e));
		}
		r.runtime_seconds = j.at("runtime_seconds").get<double>();
		return r;
	} catch (const nlohmann::json::exception &e) {
		throw ConfigError(std::string("malformed report: ") + e.what());
	}
}

Thresholds calibrate_from_totals(const LeakageTotals &totals)
{
	if (totals.secrets.size() < 2)
		throw ConfigError("calibration needs at least two secret bits, got " + std::to_string(totals.secrets.size()));
	Thresholds t;
	t.warn = totals.secrets.front().total;
	double sum = 0.0;
	for (const SecretTotal &s : totals.secrets) {
		t.warn = std::min(t.warn, s.total);
		sum += s.total;
	}
	t.detect = sum / static_cast<double>(totals.secrets.size());
	return t;
}

} // namespace qflow
