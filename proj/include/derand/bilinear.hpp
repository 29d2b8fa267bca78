#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "derand/ensembles.hpp"
#include "derand/rational.hpp"

namespace derand {

// Function of the stage bits of a few variables. Slot a of the table index
// covers bits [a*window, (a+1)*window), holding variable vars[a]'s stage bits.
struct Junta {
    std::vector<uint32_t> vars;  // distinct variable ids
    std::vector<Rat> table;      // size 1 << (vars.size() * window)
};

Junta constant_junta(Rat c);

// One bilinear term: (sum of left juntas) * (sum of right juntas).
struct Group {
    std::vector<Junta> left, right;
};

// Coefficients with f(z) = sum_mask coeff[mask] * (-1)^popcount(z & mask),
// computed by the in-place butterfly and scaled by 2^-log2(size). Exact.
std::vector<Rat> wht(std::vector<Rat> table);

// Fourier-expand both sides; table bit a*window + l maps to ground id
// vars[a]*window + l. Weights of identical parity sets merge.
Ensemble group_to_ensemble(const Group& g, int window);

struct EngineOptions {
    int window = 2;  // bit-levels fixed per stage (last stage may be narrower)
    int width = 1;   // max variables per junta; selects the code family
    SearchOptions search;
};

// Called with the number of already-fixed leading bit-levels and the fixed
// values. Returns groups whose summed products give, as a function of the next
// window's bits z, the expectation of the objective conditioned on prefix # z
// with the remaining low bits uniform. Must be a pure function of its inputs.
using StageBuilder =
    std::function<std::vector<Group>(int fixed_bits, const std::vector<uint64_t>& prefix)>;

struct EngineResult {
    std::vector<uint64_t> x;           // per variable, all bits, fixed most-significant first
    std::vector<Rat> trace;            // non-decreasing conditional expectations
    std::vector<size_t> stage_starts;  // trace index where each stage's search begins
    Rat expectation;                   // trace front: expectation under uniform bits
    Rat value;                         // trace back: objective at the returned x
};

// Stage-wise maximization: each stage Fourier-expands the builder's groups,
// runs the code-lattice search over the stage bits of all variables, and
// appends the winning bits. The value achieved at the end of each stage must
// equal the next stage's sum of T exactly (throws on mismatch, as on any
// trace decrease).
EngineResult maximize_stages(uint32_t nvars, int bits, const StageBuilder& build,
                             const EngineOptions& opts = {});

// q[v][z]: success probability of variable v given its fixed prefix, stage
// bits z, and uniform free lower bits.
using QTables = std::vector<std::vector<Rat>>;

using BernoulliBuilder = std::function<std::vector<Group>(const QTables& q)>;

struct BernoulliResult {
    std::vector<uint8_t> x;
    std::vector<uint64_t> y;
    std::vector<Rat> trace;
    std::vector<size_t> stage_starts;
    Rat expectation;
    Rat value;
};

// Derandomizes x_i = [y_i < k_i] over b-bit y_i. The builder expresses the
// objective's expectation under independent Bernoulli marginals; the engine
// supplies the exact per-stage marginals by interval counting on k_i.
BernoulliResult maximize_bernoulli(const std::vector<uint64_t>& k, int bits,
                                   const BernoulliBuilder& build, const EngineOptions& opts = {});

}  // namespace derand
