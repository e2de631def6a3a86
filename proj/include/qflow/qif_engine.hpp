/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/bitgraph.hpp"
#include "qflow/channelizer.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace qflow {

/// Min-entropy of one bit: -log2(max(p1, 1 - p1)).
double source_leakage(double p1);

/// p1 of primary-input bits; unlisted bits use `fallback`.
struct InputProbabilities
{
	double fallback = 0.5;
	std::map<BitRef, double> bits;

	double get(const BitRef &bit) const;
};

/// Sparse secret-bit-id -> bits, sorted by id.
class LeakageVector
{
      public:
	std::vector<std::pair<int, double>> entries;

	double at(int secret) const;
	bool empty() const { return entries.empty(); }
	void add(int secret, double value);
	/// this += other * scale
	void add_scaled(const LeakageVector &other, double scale);
	LeakageVector scaled(double factor) const;
	/// Largest absolute entrywise difference.
	double distance(const LeakageVector &other) const;
	/// Entrywise maximum.
	static LeakageVector max(const LeakageVector &a, const LeakageVector &b);
};

/// Masses J(o, l, h) of one channel, indexed ((o * 2^|L|) + l) * 2^|H| + h.
struct JointTable
{
	std::vector<int> high;
	std::vector<int> low;
	std::vector<double> mass;

	double at(int o, std::uint64_t l, std::uint64_t h) const;
	double total() const;
};

/**
 * Per-channel input view used by the equations: probability of each input
 * and whether it is treated as High (secret-bearing) or observable Low.
 */
struct ChannelInputs
{
	std::vector<double> p1;
	std::vector<bool> high;
};

/// Errors: ArityMismatch when the view does not match the channel.
JointTable joint_distribution(const Channel &channel, const ChannelInputs &in);
/// V1 = sum over (o, l) of max over h of J.
double channel_pbv(const Channel &channel, const ChannelInputs &in);
/// Probability that the channel output is 1 under independent inputs.
double channel_p1(const Channel &channel, const std::vector<double> &p1);

/// Closed-form PBV of a macro channel with uniform High inputs; nullopt when the
/// operand labeling has no closed form.
std::optional<double> macro_pbv_closed_form(const Channel &channel, const ChannelInputs &in);
/// Closed-form p1 of a macro channel, exact when every input fills one slot.
double macro_p1_closed_form(const Channel &channel, const std::vector<double> &p1);

/// Exhaustive PBV and p1 for channels of at most this many inputs.
constexpr int kEnumerationLimit = 16;

struct ChannelState
{
	double p1 = 0.5;
	double pbv = 1.0;
	bool secret = false;
	LeakageVector leakage;
};

struct EngineOptions
{
	int max_iterations = 100;
	double tolerance = 1e-9;
	/// Clamp register leakage inside sequential cycles to the source min-entropy.
	bool cap = true;
};

struct ProbAnnotatedGraph
{
	const Forest *forest = nullptr;
	const ChannelGraph *graph = nullptr;
	const DependencyGraph *deps = nullptr;
	InputProbabilities probs;
	std::vector<ChannelState> channels;
	/// Fixpoint iterations used, summed over cyclic components.
	int iterations = 0;

	/// Probabilities and labels of the inputs of channel `c` as the equations see them.
	ChannelInputs inputs_of(int c) const;
};

/// Probabilities in topological order with register pass-through; also marks secret-bearing channels.
ProbAnnotatedGraph propagate_probabilities(const Forest &forest, const ChannelGraph &graph, const DependencyGraph &deps,
					   const InputProbabilities &probs, const EngineOptions &options = {});

/// Fills per-channel PBV and leakage vectors. Errors: NonConvergentFixpoint.
void propagate_leakage(ProbAnnotatedGraph &annotated, const EngineOptions &options = {});

struct PathLeakage
{
	std::size_t root = 0;
	double leakage = 0.0;
};

struct SecretTotal
{
	int secret = -1;
	BitRef bit;
	double source = 0.0;
	/// Sum over output paths before the cap.
	double raw = 0.0;
	double total = 0.0;
	std::vector<PathLeakage> paths;
};

struct LeakageTotals
{
	/// Every secret bit in id order, including bits that reach no output.
	std::vector<SecretTotal> secrets;
	bool cap = true;

	LeakageVector vector() const;
	double sum() const;
};

LeakageTotals accumulate_totals(const ProbAnnotatedGraph &annotated, bool cap = true);

} // namespace qflow
