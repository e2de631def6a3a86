/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "support/corpus.hpp"

#include "qflow/pipeline.hpp"
#include "qflow/report.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <sstream>

using namespace qflow;
using qflow::testing::corpus_unit;

namespace {

std::unique_ptr<AnalysisResult> example()
{
	AnalysisConfig config;
	config.top = "example";
	config.max_channel_inputs = 3;
	return analyze(corpus_unit({"two_secret_example.v"}, "example"), config);
}

} // namespace

TEST_SUITE("report")
{

TEST_CASE("default thresholds")
{
	Thresholds t;
	CHECK(t.warn == 2.89154e-3);
	CHECK(t.detect == 1.53939e-2);
}

TEST_CASE("classification boundaries are strict")
{
	Thresholds t;
	CHECK(classify_value(1.0, t) == LeakClass::Leak);
	CHECK(classify_value(2.66e-4, t) == LeakClass::Ok);
	CHECK(classify_value(0.0, t) == LeakClass::Ok);
	CHECK(classify_value(t.warn, t) == LeakClass::Ok);
	CHECK(classify_value(std::nextafter(t.warn, 1.0), t) == LeakClass::Warn);
	CHECK(classify_value(t.detect, t) == LeakClass::Warn);
	CHECK(classify_value(std::nextafter(t.detect, 1.0), t) == LeakClass::Leak);
}

TEST_CASE("threshold validation")
{
	CHECK_NOTHROW(Thresholds{}.validate());
	CHECK_NOTHROW((Thresholds{0.1, 0.1}.validate()));
	CHECK_THROWS_AS((Thresholds{0.2, 0.1}.validate()), ConfigError);
	CHECK_THROWS_AS((Thresholds{-0.1, 0.1}.validate()), ConfigError);
}

TEST_CASE("names")
{
	for (LeakClass c : {LeakClass::Ok, LeakClass::Warn, LeakClass::Leak})
		CHECK(parse_class(class_name(c)) == c);
	CHECK(std::string(class_name(LeakClass::Leak)) == "leak");
	CHECK(parse_format("json") == Format::Json);
	CHECK(parse_format("csv") == Format::Csv);
	CHECK(parse_format("text") == Format::Text);
	CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("example report")
{
	auto r = example();
	const Report &rep = r->report;
	REQUIRE(rep.secrets.size() == 2);
	CHECK(rep.count(LeakClass::Leak) == 2);
	CHECK(rep.total() == doctest::Approx(1.25));
	CHECK(rep.secrets[0].net == "i");
	CHECK(rep.secrets[0].bit == 0);
	CHECK(rep.secrets[1].bit == 1);
	REQUIRE(rep.secrets[0].paths.size() == 2);
	CHECK(rep.secrets[0].paths[0].output_net == "o");
	CHECK(rep.secrets[0].paths[0].output_bit == 0);
	CHECK(rep.secrets[0].paths[0].leakage_bits == doctest::Approx(0.375));
	CHECK(rep.secrets[0].paths[1].leakage_bits == doctest::Approx(0.25));
	CHECK(rep.design.top == "example");
	CHECK(rep.design.max_channel_inputs == 3);
}

TEST_CASE("JSON round trip")
{
	auto r = example();
	std::string text = render(r->report, Format::Json);
	auto doc = nlohmann::json::parse(text);
	CHECK(doc["schema"] == Report::kSchema);
	CHECK(doc["secrets"].size() == 2);
	Report back = parse_json_report(text);
	CHECK(back.design == r->report.design);
	CHECK(back.secrets == r->report.secrets);
	CHECK(back.thresholds.warn == r->report.thresholds.warn);
	CHECK(back.thresholds.detect == r->report.thresholds.detect);
	CHECK_THROWS_AS(parse_json_report("{"), ConfigError);
	CHECK_THROWS_AS(parse_json_report("{\"schema\": 1}"), ConfigError);
}

TEST_CASE("CSV rows")
{
	auto r = example();
	std::istringstream csv(render(r->report, Format::Csv));
	std::string line;
	std::vector<std::string> lines;
	while (std::getline(csv, line))
		lines.push_back(line);
	REQUIRE(lines.size() == 3);
	CHECK(lines[0] == "secret_bit_index,leakage_bits");
	CHECK(lines[1].rfind("0,", 0) == 0);
	CHECK(std::stod(lines[1].substr(2)) == doctest::Approx(0.625));
	CHECK(lines[2].rfind("1,", 0) == 0);
}

TEST_CASE("text summary")
{
	auto r = example();
	std::string text = render(r->report, Format::Text);
	CHECK(text.find("2 leak, 0 warn, 0 ok") != std::string::npos);
	CHECK(text.find("i[0]") != std::string::npos);
}

TEST_CASE("calibration from totals")
{
	LeakageTotals totals;
	for (double v : {0.2, 0.4, 0.9}) {
		SecretTotal s;
		s.secret = static_cast<int>(totals.secrets.size());
		s.total = v;
		totals.secrets.push_back(s);
	}
	Thresholds t = calibrate_from_totals(totals);
	CHECK(t.warn == doctest::Approx(0.2));
	CHECK(t.detect == doctest::Approx(0.5));
	totals.secrets.resize(1);
	CHECK_THROWS_AS(calibrate_from_totals(totals), ConfigError);
}

TEST_CASE("bundled calibration design golden thresholds")
{
	AnalysisConfig config;
	config.top = "toy_spn2";
	Thresholds t = calibrate_thresholds(corpus_unit({"toy_spn2.v"}, "toy_spn2"), config);
	// Every key bit saturates at its one-bit source bound under the cap.
	CHECK(t.warn == doctest::Approx(1.0).epsilon(1e-12));
	CHECK(t.detect == doctest::Approx(1.0).epsilon(1e-12));
	CHECK(t.warn <= t.detect);
}

}
