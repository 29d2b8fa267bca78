#pragma once

#include <cstdint>
#include <vector>

#include "derand/automata.hpp"
#include "derand/rational.hpp"

namespace derand::automata {

struct ReduceOptions {
    // Largest engine support for one merge; must be a power of two and at most
    // product_cap so capped merges always compress.
    uint64_t support_cap = 512;
    // Largest pairwise product kept verbatim instead of compressed.
    uint64_t product_cap = uint64_t(1) << 18;
    int chunk = 2;  // code bits fixed per search step
    int threads = 1;
};

struct ReduceReport {
    uint64_t e_required = 0;  // support meeting the expectation bound, saturated
    uint64_t e_used = 0;      // output support (product size on fallback)
    bool product_fallback = false;
    bool capped = false;  // e_used was clipped below the required support
    size_t classes = 0;   // balanced transition classes
    Rat eps;
    Rat expected_s;  // engine objective mean; below 1/2 when uncapped
    Rat achieved_s;  // objective at the selection, at most expected_s
    std::vector<Rat> err_each;  // exact distance to the full product, per automaton
    Rat err_measured;           // max of err_each
    bool certified = false;     // err_measured <= eps
    bool apriori = false;       // guaranteed without measuring: exact product, or
                                // an uncapped selection with expected_s < 1
};

struct ReduceResult {
    FooledDistribution dist;
    ReduceReport report;
};

// Merge two abutting fooled windows into one whose per-automaton distance to
// the exact pairwise product is at most eps. Small products are kept verbatim;
// otherwise a uniform multiset of pairs is selected by minimizing a sum of
// per-class Chebyshev functionals through the conditional-expectations engine.
// Both supports must be powers of two. Duplicate selected pairs are retained.
// Counter-kind inputs are driven entirely by their attached offsets; the
// system's transition function is not consulted.
ReduceResult reduce(const AutomatonSystem& sys, const FooledDistribution& d1,
                    const FooledDistribution& d2, const Rat& eps, const CanonicalFamily& fam,
                    const ReduceOptions& opts = {});

// Copy with the window start moved; meaningful when transitions do not depend
// on absolute time.
FooledDistribution shift_window(FooledDistribution d, int t);

struct FoolNode {
    int t = 0, h = 0;
    ReduceReport report;
};

struct FoolResult {
    FooledDistribution dist;
    std::vector<Rat> err_each;  // per automaton: summed merge errors, bounds the
                                // exact distance to uniform
    Rat err_bound;           // max of err_each
    bool certified = false;  // err_bound <= eps
    // The 2 m family_cost / eps^2 headline. Verbatim-product levels can exceed
    // it when the state space is tiny, so it is reported, not enforced.
    uint64_t support_bound = 0;
    std::vector<FoolNode> nodes;  // merges in evaluation order
};

// ceil(2 m family_cost / eps^2), the support headline for fool's output.
uint64_t fool_support_bound(const AutomatonSystem& sys, const Rat& eps, const CanonicalFamily& fam);

// Fool the window [t, t+h) to error eps by recursive halving: each half runs
// at (eps/2)(1 - 1/h) and the merge at eps/h, so the budgets telescope to eps
// exactly. h must be a power of two with t + h <= sys.T. The returned error
// bound sums the exact measured merge errors, so it is usually far below eps.
FoolResult fool(const AutomatonSystem& sys, int t, int h, const Rat& eps,
                const CanonicalFamily& fam, const ReduceOptions& opts = {});

}  // namespace derand::automata
