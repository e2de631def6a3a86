/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

// Acceptance checks. Usage: qflow_acceptance [criterion...]; no argument runs all.
// Exit status: 0 when every selected check passes, 1 on any failure, 77 when all were skipped.

#include "support/corpus.hpp"
#include "support/enumeration.hpp"
#include "support/random_channels.hpp"

#include "qflow/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace qflow;
using namespace qflow::testing;

namespace {

enum class Status
{
	Pass,
	Fail,
	Skip,
};

struct Outcome
{
	Status status = Status::Fail;
	std::string detail;
};

class Stopwatch
{
      public:
	double seconds() const
	{
		return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
	}

      private:
	std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char *format, ...) __attribute__((format(printf, 1, 2)));

std::string fmt(const char *format, ...)
{
	char buf[1024];
	va_list args;
	va_start(args, format);
	std::vsnprintf(buf, sizeof buf, format, args);
	va_end(args);
	return buf;
}

Outcome verdict(bool ok, std::string detail)
{
	return {ok ? Status::Pass : Status::Fail, std::move(detail)};
}

Outcome example_golden()
{
	Stopwatch clock;
	AnalysisConfig config;
	config.top = "example";
	config.max_channel_inputs = 3;
	auto r = analyze(corpus_unit({"two_secret_example.v"}, "example"), config);
	double pbv = r->annotated.channels[r->channels.root_channel[0]].pbv;
	bool totals_ok = r->totals.secrets.size() == 2;
	for (const SecretTotal &s : r->totals.secrets)
		totals_ok = totals_ok && std::abs(s.total - 0.625) <= 1e-9;
	double exact = exact_design_leakage(*r).bits;
	double secs = clock.seconds();
	bool ok = std::abs(pbv - 0.375) <= 1e-9 && totals_ok && std::abs(exact - 0.585) <= 5e-4 &&
		  exact <= r->totals.sum() + kDominationTolerance && secs < 1.0;
	return verdict(ok, fmt("o[0] PBV %.12g, totals %.12g/%.12g, exact %.6f <= QModel %.6f, %.3f s", pbv,
			       r->totals.secrets.empty() ? 0.0 : r->totals.secrets[0].total,
			       r->totals.secrets.size() < 2 ? 0.0 : r->totals.secrets[1].total, exact, r->totals.sum(), secs));
}

Outcome trojan_benchmarks()
{
	bool ok = true;
	std::ostringstream detail;
	for (const char *file : {"aes_t2100_tsc.v", "aes_t2200_tsc.v", "aes_t2300_tsc.v"}) {
		Stopwatch clock;
		AnalysisConfig config;
		config.top = "TSC";
		config.high = {"key"};
		auto r = analyze(corpus_unit({file}, "TSC"), config);
		int leak_at_one = 0;
		for (const SecretEntry &s : r->report.secrets)
			if (s.cls == LeakClass::Leak && std::abs(s.leakage_bits - 1.0) <= 1e-6)
				++leak_at_one;
		double total = r->report.total();
		double secs = clock.seconds();
		bool here = leak_at_one == 64 && r->report.count(LeakClass::Leak) == 64 && std::abs(total - 64.0) <= 1e-6 &&
			    secs < 10.0;
		ok = ok && here;
		detail << fmt("%s: %d leak bits at 1.0, total %.9g, %.2f s; ", file, leak_at_one, total, secs);
	}
	return verdict(ok, detail.str());
}

Outcome threshold_constants()
{
	Thresholds t;
	bool ok = t.warn == 2.89154e-3 && t.detect == 1.53939e-2 && classify_value(1.0, t) == LeakClass::Leak &&
		  classify_value(2.66e-4, t) == LeakClass::Ok;
	return verdict(ok, fmt("warn %g, detect %g, 1.0 -> %s, 2.66e-4 -> %s", t.warn, t.detect,
			       class_name(classify_value(1.0, t)), class_name(classify_value(2.66e-4, t))));
}

Outcome probability_sweep()
{
	Stopwatch clock;
	bool ok = true;
	std::ostringstream detail;
	struct Benchmark
	{
		const char *file;
		const char *top;
		std::vector<std::string> high;
		int max_inputs;
		bool shape_asserted;
	};
	const std::vector<Benchmark> benchmarks = {{"two_secret_example.v", "example", {}, 3, false},
						   {"aes_t2100_tsc.v", "TSC", {"key"}, 5, true},
						   {"aes_t2200_tsc.v", "TSC", {"key"}, 5, true},
						   {"aes_t2300_tsc.v", "TSC", {"key"}, 5, true}};
	// Zero leakage at p in {0, 1} holds for every design. The peak at 1/2 and the
	// symmetry are asserted on the trojan benchmarks only; AND/OR channels make
	// derived probabilities asymmetric in general.
	for (const Benchmark &b : benchmarks) {
		const char *file = b.file;
		auto unit = corpus_unit({file}, b.top);
		std::map<int, double> leak;
		for (int step = 0; step <= 20; ++step) {
			AnalysisConfig config;
			config.top = b.top;
			config.high = b.high;
			config.max_channel_inputs = b.max_inputs;
			config.p_high = step / 20.0;
			leak[step] = analyze(unit, config)->totals.sum();
		}
		double asym = 0.0;
		bool peak = true;
		for (int step = 0; step <= 20; ++step) {
			asym = std::max(asym, std::abs(leak[step] - leak[20 - step]));
			peak = peak && leak[step] <= leak[10] + 1e-9;
		}
		bool here = std::abs(leak[0]) <= 1e-9 && std::abs(leak[20]) <= 1e-9 &&
			    (!b.shape_asserted || (peak && asym <= 1e-9 && leak[10] > 0));
		ok = ok && here;
		detail << fmt("%s: L(0)=%.3g L(0.5)=%.9g L(1)=%.3g asym %.3g%s%s; ", file, leak[0], leak[10], leak[20], asym,
			      peak ? "" : " peak off 1/2", b.shape_asserted ? "" : " (shape not asserted)");
	}
	double secs = clock.seconds();
	ok = ok && secs < 30.0;
	detail << fmt("%.2f s", secs);
	return verdict(ok, detail.str());
}

Outcome merge_sweep()
{
	Stopwatch clock;
	AnalysisConfig config;
	config.top = "toy_spn2";
	auto rows = calibrate_sweep(corpus_unit({"toy_spn2.v"}, "toy_spn2"), config, 1, 5);
	bool ok = rows.size() == 5;
	std::ostringstream detail;
	detail << "mean per bit:";
	for (std::size_t i = 0; i < rows.size(); ++i) {
		detail << fmt(" %d:%.6g", rows[i].max_channel_inputs, rows[i].mean);
		if (i > 0 && rows[i].mean > rows[i - 1].mean + 1e-12)
			ok = false;
	}
	double secs = clock.seconds();
	ok = ok && secs < 30.0;
	detail << fmt(", %.2f s", secs);
	return verdict(ok, detail.str());
}

Outcome oracle_domination()
{
	Stopwatch clock;
	auto cases = oracle_diff(42, 200, 12);
	int violations = 0, sequential = 0;
	double worst = 0.0;
	for (const OracleDiffCase &c : cases)
		if (!c.dominated) {
			++violations;
			if (c.verilog.find("always") != std::string::npos)
				++sequential;
			worst = std::max(worst, c.exact_bits - c.qmodel_bits);
		}
	double secs = clock.seconds();
	bool ok = cases.size() == 200 && violations == 0 && secs < 120.0;
	return verdict(ok, fmt("%d/%zu circuits with exact > QModel (%d sequential, %d combinational), worst excess "
			       "%.4f bits, %.2f s",
			       violations, cases.size(), sequential, violations - sequential, worst, secs));
}

Outcome exactness()
{
	Stopwatch clock;
	std::mt19937_64 rng(20240611);
	double worst_p1 = 0.0, worst_pbv = 0.0;
	for (int trial = 0; trial < 1000; ++trial) {
		Channel ch = random_table_channel(rng, 1 + static_cast<int>(rng() % 5));
		ChannelInputs in = random_view(rng, ch);
		auto f = as_function(ch);
		worst_p1 = std::max(worst_p1, std::abs(channel_p1(ch, in.p1) - brute_p1(f, in.p1)));
		worst_pbv = std::max(worst_pbv, std::abs(channel_pbv(ch, in) - brute_pbv(f, in.p1, in.high)));
	}
	double worst_macro = 0.0;
	int closed = 0;
	for (MacroKind kind : {MacroKind::Add, MacroKind::Sub, MacroKind::Eq, MacroKind::Ne, MacroKind::Lt, MacroKind::Le})
		for (int width = 2; width <= 6; ++width)
			for (int trial = 0; trial < 50; ++trial) {
				ChannelInputs in;
				Channel ch = random_macro_channel(rng, kind, width, in, false);
				auto f = as_function(ch);
				if (auto v = macro_pbv_closed_form(ch, in)) {
					++closed;
					worst_macro = std::max(worst_macro, std::abs(*v - brute_pbv(f, in.p1, in.high, true)));
				}
				worst_macro = std::max(worst_macro, std::abs(macro_p1_closed_form(ch, in.p1) - brute_p1(f, in.p1)));
			}
	double secs = clock.seconds();
	bool ok = worst_p1 <= 1e-12 && worst_pbv <= 1e-12 && worst_macro <= 1e-12 && secs < 60.0;
	return verdict(ok, fmt("1000 channels: max |dp1| %.3g, max |dPBV| %.3g; macros: %d closed forms, max error "
			       "%.3g; %.2f s",
			       worst_p1, worst_pbv, closed, worst_macro, secs));
}

/**
 * Optional external benchmarks. $QFLOW_TRUSTHUB_DIR/<name>/ holds the Verilog
 * files and a qflow.json with "top" and "high" (list of input names).
 */
Outcome external_benchmarks()
{
	const char *root = std::getenv("QFLOW_TRUSTHUB_DIR");
	if (!root || !*root)
		return {Status::Skip, "QFLOW_TRUSTHUB_DIR not set; external benchmark designs are not bundled"};
	namespace fs = std::filesystem;
	const std::vector<std::string> byte_family = {"AES-T100", "AES-T200", "AES-T700",  "AES-T800",
						      "AES-T900", "AES-T1000", "AES-T1100", "AES-T1200"};
	bool ok = true;
	int found = 0;
	std::ostringstream detail;
	auto run = [&](const std::string &name) -> std::unique_ptr<AnalysisResult> {
		fs::path dir = fs::path(root) / name;
		if (!fs::exists(dir / "qflow.json"))
			return nullptr;
		++found;
		auto meta = nlohmann::json::parse(std::ifstream(dir / "qflow.json"));
		std::vector<std::string> files;
		for (const auto &entry : fs::directory_iterator(dir))
			if (entry.path().extension() == ".v")
				files.push_back(entry.path().string());
		AnalysisConfig config;
		config.top = meta.at("top").get<std::string>();
		config.high = meta.value("high", std::vector<std::string>{});
		return analyze(load_sources(files, config.top), config);
	};
	for (const std::string &name : byte_family) {
		auto r = run(name);
		if (!r)
			continue;
		int at_one = 0;
		for (const SecretEntry &s : r->report.secrets)
			if (s.cls == LeakClass::Leak && std::abs(s.leakage_bits - 1.0) <= 1e-6)
				++at_one;
		bool here = at_one == 8 && r->report.count(LeakClass::Leak) == 8;
		ok = ok && here;
		detail << fmt("%s: %d leak bits at 1.0; ", name.c_str(), at_one);
	}
	if (auto r = run("AES-T1600")) {
		double mean = r->report.secrets.empty() ? 0.0 : r->report.total() / r->report.secrets.size();
		bool here = std::abs(mean - 0.222) <= 0.2 * 0.222;
		ok = ok && here;
		detail << fmt("AES-T1600: mean %.4f; ", mean);
	}
	if (found == 0)
		return {Status::Skip, std::string("no benchmark directories with qflow.json under ") + root};
	return verdict(ok, detail.str());
}

struct Criterion
{
	int id;
	const char *name;
	std::function<Outcome()> check;
};

const std::vector<Criterion> &criteria()
{
	static const std::vector<Criterion> all = {
	    {1, "example golden values", example_golden},
	    {2, "trojan benchmarks", trojan_benchmarks},
	    {3, "threshold constants", threshold_constants},
	    {4, "probability sweep shape", probability_sweep},
	    {5, "merge sweep trend", merge_sweep},
	    {6, "oracle domination", oracle_domination},
	    {7, "exactness properties", exactness},
	    {8, "external benchmarks", external_benchmarks},
	};
	return all;
}

} // namespace

int main(int argc, char **argv)
{
	std::vector<int> selected;
	for (int i = 1; i < argc; ++i) {
		std::string arg = argv[i];
		if (!arg.empty() && (arg[0] == 'c' || arg[0] == 'C'))
			arg = arg.substr(1);
		selected.push_back(std::atoi(arg.c_str()));
	}
	int failed = 0, skipped = 0, run = 0;
	for (const Criterion &c : criteria()) {
		if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end())
			continue;
		++run;
		Outcome o;
		try {
			o = c.check();
		} catch (const std::exception &e) {
			o = {Status::Fail, std::string("error: ") + e.what()};
		}
		const char *tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
		std::printf("c%d %s %s: %s\n", c.id, tag, c.name, o.detail.c_str());
		failed += o.status == Status::Fail;
		skipped += o.status == Status::Skip;
	}
	std::fflush(stdout);
	if (run == 0) {
		std::fprintf(stderr, "no such criterion\n");
		return 2;
	}
	if (failed)
		return 1;
	return skipped == run ? 77 : 0;
}
