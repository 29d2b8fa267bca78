#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "derand/bilinear.hpp"
#include "derand/rational.hpp"

namespace derand {

// Exponents of one distinct-index product, one positive entry per index slot;
// the term is sum over tuples of pairwise-distinct indices of
// prod_u l_i(x_{i_u})^{pattern[u]}.
using Pattern = std::vector<int>;

struct PatternTerm {
    Pattern pattern;
    Rat coeff;
};

// sum of its terms, all over the same per-index value tables.
struct MomentFunctional {
    std::vector<PatternTerm> terms;
};

struct MomentSystem {
    uint32_t n = 0;  // index count
    int bits = 0;    // bits per variable
    std::vector<MomentFunctional> functionals;
};

// A set partition of the pattern's slots with its partition-lattice Mobius
// weight prod_B (-1)^(|B|-1) (|B|-1)!.
struct SlotPartition {
    std::vector<std::vector<int>> blocks;  // ordered by smallest slot
    Rat mobius;
};

// All partitions of {0..p-1}; p <= 12.
std::vector<SlotPartition> set_partitions(int p);

// Conditional moment oracle:
// peo(j, i, s, fixed_bits, prefix) = E[l_{j,i}(X)^s | leading fixed_bits of X = prefix].
// At fixed_bits = bits this is a point evaluation.
using Peo = std::function<Rat(uint32_t j, uint32_t i, int s, int fixed_bits, uint64_t prefix)>;

// Exact suffix averaging over the value tables; tables[j][i] has 2^bits
// entries.
Peo make_table_peo(std::vector<std::vector<std::vector<Rat>>> tables, int bits);

// (sum_i l_i - mu)^2 / tol^2 as pattern terms.
MomentFunctional chebyshev_functional(const Rat& mu, const Rat& tol);

// Same with the squared tolerance given directly, for tolerances whose square
// root is irrational.
MomentFunctional chebyshev_functional_sq(const Rat& mu, const Rat& tol_sq);

// S at a full assignment through the partition expansion; linear in n per
// partition.
Rat eval_system(const MomentSystem& sys, const Peo& peo, const std::vector<uint64_t>& x);

struct MomentResult {
    std::vector<uint64_t> x;
    Rat expectation;  // E[S] under uniform bits
    Rat value;        // S(x), at most the expectation
    std::vector<Rat> trace;  // non-increasing
    std::vector<size_t> stage_starts;
};

// Conditional-expectations minimization of S. Each stage expands every
// (term, partition) pair into bilinear groups whose junta tables are products
// of peo values, splitting each partition's blocks across the two sides.
MomentResult minimize_system(const MomentSystem& sys, const Peo& peo,
                             const EngineOptions& opts = {});

}  // namespace derand
