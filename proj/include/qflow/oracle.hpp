/*
 * qflow -- quantitative information flow analysis for Verilog designs
 *
 * Licensed under the Apache License, Version 2.0, see LICENSE for details.
 */

#pragma once

#include "qflow/bitgraph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qflow {

/// Total enumerated input bits (High plus Low) accepted by the exact computations.
constexpr int kOracleMaxBits = 24;

/**
 * A design as one deterministic function from (High, Low) input bits to the
 * observation: every top-output bit in each of `cycles` clock cycles. Registers
 * start at 0 and inputs are held for the whole run. Inputs that no tree reads
 * are left out; they cancel in the leakage ratio.
 */
class FlatFunction
{
      public:
	std::vector<BitRef> high;
	std::vector<BitRef> low;
	std::vector<BitRef> outputs;
	int cycles = 1;

	std::size_t observation_bits() const { return outputs.size() * cycles; }

	/// Bitsliced evaluation: lane k of every word is one independent run.
	void eval(const std::vector<std::uint64_t> &high_words, const std::vector<std::uint64_t> &low_words,
		  std::vector<std::uint64_t> &observation) const;
	std::vector<bool> eval(const std::vector<bool> &h, const std::vector<bool> &l) const;

      private:
	friend FlatFunction flatten(const Forest &forest, int cycles);

	enum Source : std::uint8_t
	{
		Zero,
		One,
		High,
		Low,
		Register,
		Gate,
	};
	struct Instr
	{
		Op op = Op::Const0;
		MacroKind macro = MacroKind::Add;
		Source source = Zero;
		int index = 0;
		std::vector<int> kids;
	};
	std::vector<Instr> program_;
	/// Program slot of each register's next state, and of each output's value.
	std::vector<int> next_state_;
	std::vector<int> output_slot_;
	/// Register index of an output that is itself a register, else -1.
	std::vector<int> output_register_;
};

/// Unrolls `cycles` cycles when the design has registers, 1 otherwise.
FlatFunction flatten(const Forest &forest, int cycles = 8);

/// Errors: TooLarge above kOracleMaxBits.
double exact_prior_vulnerability(const std::vector<double> &high_p1);
/// Sum over (o, l) of the max over h of J. Errors: TooLarge.
double exact_posterior_vulnerability(const FlatFunction &f, const std::vector<double> &high_p1,
				     const std::vector<double> &low_p1);

struct MultiplicativeLeakage
{
	double ratio = 1.0;
	double bits = 0.0;
};

MultiplicativeLeakage exact_multiplicative_leakage(const FlatFunction &f, const std::vector<double> &high_p1,
						   const std::vector<double> &low_p1);

/// Worker threads for enumeration: hardware concurrency capped by QFLOW_THREADS.
unsigned worker_threads();

struct RandomCircuitOptions
{
	int max_bits = 12;
	int min_gates = 2;
	int max_gates = 10;
	double register_probability = 0.25;
};

/// A small random gate-level module named `rc` with a High input `h`, Low input `l` and output `o`.
std::string random_circuit(std::uint64_t seed, const RandomCircuitOptions &options = {});

} // namespace qflow
