#pragma once

#include <cstdint>
#include <vector>

#include "derand/automata.hpp"
#include "derand/fooling.hpp"
#include "derand/rational.hpp"

namespace derand::apps {

using automata::FoolResult;
using automata::ReduceOptions;
using automata::ReduceReport;

// Counter automata tracking the signed running sum of each row against a
// common bit string: bit 1 at step t adds rows[i][t], bit 0 subtracts it.
// Columns are padded with zero increments up to a power-of-two horizon, and
// sums live mod eta, which must be odd and exceed twice the largest reachable
// magnitude.
automata::AutomatonSystem row_counter_system(const std::vector<std::vector<long>>& rows,
                                             uint32_t eta);

// Signed sum encoded by a counter state, valid while |sum| <= (eta - 1) / 2.
long decode_sum(uint32_t s, uint32_t eta);

struct SetDiscOptions {
    Rat eps;  // merge budget; 0 picks 1/(2m)
    ReduceOptions reduce;
};

struct SetDiscResult {
    std::vector<int> signs;  // per column, +1 or -1
    std::vector<long> sums;  // per row under signs
    long max_abs = 0;
    long lambda_sq = 0;  // floor(2 n ln(4 m)): rows must satisfy sum^2 <= lambda_sq
    Rat eps;
    Rat p_uniform;     // union bound on a uniform draw violating some row
    Rat exists_bound;  // p_uniform plus half the summed merge errors
    bool guaranteed = false;  // exists_bound < 1, forcing a qualifying string
    uint64_t support = 0;
    Rat fool_err_bound;
};

// Signs keeping every row sum of an m x n {-1,0,1} matrix within
// sqrt(2 n ln(4 m)), found by scanning a fooled distribution at budget eps.
// Throws std::runtime_error if no support string qualifies, which requires
// exists_bound >= 1.
SetDiscResult set_discrepancy(const std::vector<std::vector<int>>& matrix,
                              const SetDiscOptions& opts = {});

struct GbAutomataOptions {
    Rat eps;  // merge budget; 0 picks the largest power-of-two reciprocal <= n^{-1/2}
    ReduceOptions reduce;
};

struct GbAutomataResult {
    std::vector<int> x, y;  // +1 or -1
    long value = 0;         // x^T M y = sum_i |R_i| at the selection
    Rat expected_uniform;   // sum_i E|R_i| over uniform y, exact
    Rat bound_apriori;      // expected_uniform - eps n^2, from the budget alone
    Rat bound_measured;     // expected_uniform - n/2 times the summed measured errors
    Rat eps;
    Rat fool_err_bound;
    uint64_t support = 0;
};

// Gale-Berlekamp switching via row-sum automata: scan a fooled distribution
// for the y maximizing sum_i |R_i(y)| with R_i = sum_j M_ij y_j, then take
// x_i = sign(R_i). Requires a square +-1 matrix with n <= 64.
GbAutomataResult gb_automata(const std::vector<std::vector<int>>& matrix,
                             const GbAutomataOptions& opts = {});

struct JlOptions {
    uint32_t k = 0;  // rows; 0 picks the smallest power of two >= 8 delta^-2 ln(max(n,2))
    Rat eps1;        // row-window budget; 0 picks 1/(n k)
    Rat eps2;        // doubling budget; 0 picks 1/n
    ReduceOptions reduce;
};

struct JlVectorReport {
    Rat norm_sq;        // ||L u||^2 / k at the returned matrix, exact
    Rat distortion;     // |norm_sq - 1|
    Rat proxy_sq;       // x^2 sum_r shat_r^2 / k from the quantized row sums
    Rat proxy_gap;      // |proxy_sq - norm_sq|
    bool pass = false;  // distortion <= 2 delta
};

struct JlResult {
    uint32_t d = 0;  // padded dimension actually driven
    uint32_t k = 0;
    Rat delta;
    Rat quant_step;          // x = delta^2 / (d k)
    long window_radius = 0;  // advisory row-sum radius ceil(4 sqrt(ln(2 n k))), in steps
    std::vector<std::vector<int>> matrix;  // k rows by input dimension, +-1
    bool certified = false;  // some support string kept every distortion <= 2 delta
    std::vector<JlVectorReport> reports;   // per input vector, at the returned matrix
    Rat worst_distortion;
    std::vector<Rat> err_each;  // per vector: accumulated distribution error bound
    Rat stage1_eps, stage2_eps;
    Rat stage1_err_bound;
    std::vector<ReduceReport> stage2;  // one merge per doubling of the row window
    uint64_t support = 0;
};

// Deterministic Johnson-Lindenstrauss: a +-1 matrix L with
// | ||L u||^2 / k - 1 | <= 2 delta for every input vector when certified.
// Vectors must satisfy | ||u||^2 - 1 | <= 2^-20, and delta must be a dyadic
// rational in (0, 1). Rows are fooled one at a time through quantized sums,
// then row windows are doubled with the squared sums as counter offsets; the
// returned matrix is judged on exact norms, never the quantized proxy.
JlResult jl_transform(const std::vector<std::vector<Rat>>& vectors, const Rat& delta,
                      const JlOptions& opts = {});

struct JlPair {
    size_t a = 0, b = 0;
    Rat dist_sq;       // ||u_a - u_b||^2
    Rat mapped_ratio;  // ||L (u_a - u_b)||^2 / (k dist_sq), exact
    Rat distortion;    // |mapped_ratio - 1|
};

struct JlDistancesResult {
    JlResult transform;         // run on the rescaled pairwise differences
    std::vector<JlPair> pairs;  // zero differences are skipped
};

// Pairwise variant: each nonzero difference u_a - u_b is rescaled by a dyadic
// factor to unit norm within 2^-21 and embedded; mapped_ratio divides out the
// exact rescale, so it is the true distance ratio for the original pair.
JlDistancesResult jl_distances(const std::vector<std::vector<Rat>>& vectors, const Rat& delta,
                               const JlOptions& opts = {});

}  // namespace derand::apps
