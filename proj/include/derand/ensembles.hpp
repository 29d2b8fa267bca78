#pragma once

#include <cstdint>
#include <vector>

#include "derand/codes.hpp"
#include "derand/rational.hpp"

namespace derand {

// A weighted family of subsets of the ground set. Canonical form: sets sorted,
// duplicates merged, zero weights dropped.
struct WeightedFamily {
    std::vector<std::pair<std::vector<uint32_t>, Rat>> entries;

    void canonicalize();
};

// S_E(x) = sum over (e1, e2) of E1(e1) E2(e2) (-1)^(x . (e1 xor e2)).
// E[S_E(X)] over uniform X equals eval_T.
struct Ensemble {
    WeightedFamily side1, side2;

    void canonicalize() {
        side1.canonicalize();
        side2.canonicalize();
    }
};

// Sum of E1(e) E2(e) over sets present on both sides.
Rat eval_T(const Ensemble& e);

// Literal double sum; quadratic, the oracle for the grouped fast path.
Rat eval_S_direct(const Ensemble& e, const std::vector<uint8_t>& x);

// Leading code coordinates already fixed.
struct Prefix {
    std::vector<uint8_t> bits;

    int len() const { return static_cast<int>(bits.size()); }
};

// E[sum_j S_Ej(X(Y)) | leading bits of Y fixed] where X(Y)_i = A(i).Y.
// Buckets support sets by their codeword projection on the unfixed coordinates;
// cost is near-linear in total support size. Verifies the fooling guard.
Rat grouped_conditional_expectation(const std::vector<Ensemble>& ensembles,
                                    const codes::BinaryCode& code, const Prefix& prefix);

struct SearchOptions {
    int chunk = 0;  // 0: min(4, L)
    int threads = 1;
};

struct SearchResult {
    std::vector<uint8_t> x;  // per ground id, x_i = A(i) . y
    std::vector<uint8_t> y;  // chosen code bits
    std::vector<Rat> trace;  // conditional expectations, stage 0 (= sum of T) onward
};

// Stage-wise maximization over the code lattice. Each stage fixes `chunk` more
// code bits, keeping the best extension (ties to the lexicographically smallest).
// The trace is non-decreasing; a violation throws (exact arithmetic makes any
// such violation a logic error). Final trace value equals sum_j S_Ej(x).
SearchResult lattice_search(const std::vector<Ensemble>& ensembles,
                            const codes::BinaryCode& code, const SearchOptions& opts = {});

}  // namespace derand
