/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#include "support/corpus.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sys/wait.h>

using qflow::testing::corpus_path;

namespace {

struct Run
{
	int code = -1;
	std::string out;
};

Run run(const std::string &args)
{
	std::string cmd = std::string(QFLOW_CLI_PATH) + " " + args + " 2>/dev/null";
	Run r;
	FILE *pipe = popen(cmd.c_str(), "r");
	REQUIRE(pipe);
	std::array<char, 4096> buf;
	std::size_t n;
	while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
		r.out.append(buf.data(), n);
	int status = pclose(pipe);
	r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
	return r;
}

std::string example_args()
{
	return "analyze --top example --max-channel-inputs 3 " + corpus_path("two_secret_example.v");
}

} // namespace

TEST_SUITE("cli")
{

TEST_CASE("analyze exit codes follow the worst class")
{
	CHECK(run(example_args()).code == 2);
	CHECK(run(example_args() + " --warn 0.1 --detect 10").code == 1);
	CHECK(run(example_args() + " --warn 5 --detect 10").code == 0);
	CHECK(run(example_args() + " --p-high 1.0").code == 0);
	CHECK(run("analyze --top example " + corpus_path("two_secret_example.v")).code == 2);

	Run tsc = run("analyze --top TSC --high key --format json " + corpus_path("aes_t2100_tsc.v"));
	CHECK(tsc.code == 2);
	int leaks = 0;
	auto doc = nlohmann::json::parse(tsc.out);
	for (const auto &s : doc["secrets"])
		leaks += s["class"] == "leak";
	CHECK(leaks == 64);

	std::string unreached = "/tmp/qflow_cli_unreached.v";
	std::ofstream(unreached) << "module m(input h, // qflow: high\n input low, output o);\n assign o = low;\nendmodule\n";
	Run quiet = run("analyze --top m --format csv " + unreached);
	CHECK(quiet.code == 0);
	CHECK(quiet.out == "secret_bit_index,leakage_bits\n0,0\n");
	std::remove(unreached.c_str());
}

TEST_CASE("input and configuration errors")
{
	CHECK(run("analyze --top nope " + corpus_path("two_secret_example.v")).code == 3);
	CHECK(run("analyze --top example /nonexistent/file.v").code == 3);
	CHECK(run(example_args() + " --max-channel-inputs 17").code == 3);
	CHECK(run(example_args() + " --warn 1 --detect 0.5").code == 3);
	CHECK(run(example_args() + " --format yaml").code == 3);

	std::string bad = "/tmp/qflow_cli_syntax_error.v";
	std::ofstream(bad) << "module m(input a, output y);\n assign y = a +;\nendmodule\n";
	CHECK(run("analyze --top m " + bad).code == 3);
	std::remove(bad.c_str());
}

TEST_CASE("machine-readable formats")
{
	Run json = run(example_args() + " --format json");
	CHECK(json.code == 2);
	auto doc = nlohmann::json::parse(json.out);
	CHECK(doc["secrets"].size() == 2);

	Run csv = run(example_args() + " --format csv");
	CHECK(csv.out.rfind("secret_bit_index,leakage_bits\n", 0) == 0);
}

TEST_CASE("probability file")
{
	std::string probs = "/tmp/qflow_cli_probs.txt";
	std::ofstream(probs) << "# all secrets fixed\ni[0] = 0\ni[1] = 1.0\n";
	CHECK(run(example_args() + " --probs " + probs).code == 0);
	CHECK(run(example_args() + " --probs " + probs + " --p-high 0.5").code == 3);
	std::remove(probs.c_str());
}

TEST_CASE("dumps")
{
	std::string trees = "/tmp/qflow_cli_trees.txt", channels = "/tmp/qflow_cli_channels.txt";
	run(example_args() + " --dump-trees " + trees + " --dump-channels " + channels);
	auto slurp = [](const std::string &path) {
		std::ifstream in(path);
		return std::string(std::istreambuf_iterator<char>(in), {});
	};
	CHECK(slurp(trees).find("o[1] = (OR (AND i[0] i[1]) 1)") != std::string::npos);
	CHECK(slurp(channels).find("table=0x8f") != std::string::npos);
	std::remove(trees.c_str());
	std::remove(channels.c_str());
}

TEST_CASE("calibrate and oracle-diff")
{
	Run cal = run("calibrate --top toy_spn2 " + corpus_path("toy_spn2.v"));
	CHECK(cal.code == 0);
	CHECK_FALSE(cal.out.empty());
	Run diff = run("oracle-diff --seed 3 --count 4 --max-bits 6");
	CHECK((diff.code == 0 || diff.code == 1));
}

}
