#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "derand/bilinear.hpp"
#include "derand/rational.hpp"

namespace derand {

struct SignMatrix {
    uint32_t n = 0;
    std::vector<std::vector<int>> a;  // entries in {-1, 1}

    // "n" header then n*n whitespace-separated entries.
    static SignMatrix parse(std::istream& in);
};

std::vector<long> row_sums(const SignMatrix& m, const std::vector<int>& y);

struct GbResult {
    std::vector<int> y;  // column signs
    std::vector<int> x;  // row signs, the sign of each row sum (0 counts as +)
    Int value;           // sum_i |R_i(y)|
    Rat expectation;     // E[S'] under uniform signs
    Rat sprime;          // S'(y) at the returned y
    Rat certified_sq;    // 27 E[S']^2 / (4q), a lower bound on value^2
    std::vector<Rat> trace;
};

// Maximizes S'(y) = sum_i (R_i^2 - R_i^4 / q), q = 3(1 + 3n), by conditional
// expectations; |z| >= (3 sqrt(3) / (2 sqrt(q))) (z^2 - z^4/q) pointwise turns
// the achieved S' into a certified lower bound on the game value.
GbResult gb_solve(const SignMatrix& m, const EngineOptions& opts = {});

}  // namespace derand
