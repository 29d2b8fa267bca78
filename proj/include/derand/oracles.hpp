#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "derand/rational.hpp"

namespace derand::oracles {

// Brute-force references. Deliberately share no code with the search engine.

using PointFn = std::function<Rat(const std::vector<uint64_t>&)>;

// Average of f over all 2^(nvars*bits) assignments; requires nvars*bits <= 24.
Rat exhaustive_expectation(uint32_t nvars, int bits, const PointFn& f);

struct ArgmaxResult {
    Rat value;
    std::vector<uint64_t> z;
};

// Maximum of f and the first maximizer in packed-integer order (variable 0 in
// the least significant bits); same size guard as exhaustive_expectation.
ArgmaxResult exhaustive_argmax(uint32_t nvars, int bits, const PointFn& f);

// n (n - (3n^2 - 2n) / q) with q = 3 (1 + 3n): the expectation of
// sum_i (R_i^2 - R_i^4 / q) for an n x n sign matrix under uniform signs.
Rat gb_expected_sprime(uint32_t n);

// E |sum_j a_j y_j| over uniform y in {-1,1}^n by convolving partial-sum
// counts; requires a.size() <= 64.
Rat dp_abs_expectation(const std::vector<long>& a);

}  // namespace derand::oracles
