#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "derand/rational.hpp"

namespace derand::automata {

// driving bits over a time window; bit t lives at word t/64, position t%64
struct BitString {
    int len = 0;
    std::vector<uint64_t> w;

    static BitString zeros(int len);
    int bit(int t) const { return static_cast<int>((w[static_cast<size_t>(t) / 64] >> (t % 64)) & 1); }
    void set(int t, int v);
    bool operator==(const BitString& o) const { return len == o.len && w == o.w; }
};

// earliest differing time step decides
bool lex_less(const BitString& a, const BitString& b);
BitString concat(const BitString& a, const BitString& b);
std::string to_string(const BitString& r);

using TransitionFn = std::function<uint32_t(uint32_t i, int bit, uint32_t s, int t)>;

// counter transitions s -> (s + inc[i][t][bit]) mod eta
struct CounterSpec {
    uint32_t m = 0;
    uint32_t eta = 0;
    int T = 0;
    std::vector<std::vector<std::array<long, 2>>> inc;  // [i][t][bit]
};

struct AutomatonSystem {
    uint32_t m = 0;
    uint32_t eta = 0;  // states 0..eta-1, start state 0
    int T = 0;         // horizon, a power of two
    TransitionFn F;
    std::optional<CounterSpec> counter;
};

AutomatonSystem make_system(uint32_t m, uint32_t eta, int T, TransitionFn F);
AutomatonSystem make_counter_system(CounterSpec spec);

// start state -> end state per automaton over one window
struct SteppingTable {
    int t = 0, h = 0;
    std::vector<std::vector<uint32_t>> map;  // [i][s]
};

SteppingTable step_table(const AutomatonSystem& sys, const BitString& r, int t);
SteppingTable compose_tables(const SteppingTable& a, const SteppingTable& b);

enum class TableKind { full, counter };

// uniform multiset of strings with per-string transition data attached
struct FooledDistribution {
    int t = 0, h = 0;
    TableKind kind = TableKind::full;
    std::vector<BitString> strings;
    std::vector<SteppingTable> tables;            // kind == full, per string
    std::vector<std::vector<uint32_t>> offsets;   // kind == counter, [string][i] mod eta
    std::vector<std::vector<long>> true_offsets;  // kind == counter, integer sums
};

FooledDistribution make_distribution(const AutomatonSystem& sys, int t, int h,
                                     std::vector<BitString> strings, TableKind kind);
// all 2^h strings over [t, t+h), h <= 20
FooledDistribution enumerate_uniform(const AutomatonSystem& sys, int t, int h, TableKind kind);

uint32_t apply_table(const AutomatonSystem& sys, const FooledDistribution& d, size_t idx,
                     uint32_t i, uint32_t s);

// max over (i, s) of sum_{s'} |P_a(end = s') - P_b(end = s')|
Rat err(const AutomatonSystem& sys, const FooledDistribution& a, const FooledDistribution& b);

// exact end-state distributions under uniform driving bits: [i][s][s']
std::vector<std::vector<std::vector<Rat>>> uniform_marginals(const AutomatonSystem& sys, int t,
                                                             int h);

// max over (i, s) L1 distance between d and the uniform DP marginals
Rat err_uniform(const AutomatonSystem& sys, const FooledDistribution& d);

struct CanonicalFamily {
    TableKind kind = TableKind::full;
};

CanonicalFamily canonical_full(const AutomatonSystem& sys);
// rejects systems without a counter spec
CanonicalFamily canonical_counter(const AutomatonSystem& sys);

// full: eta^2; counter: 2*eta - 1
uint64_t family_cost(const CanonicalFamily& fam, uint32_t eta);
std::vector<std::pair<uint32_t, uint32_t>> enumerate_canonical(const CanonicalFamily& fam,
                                                               uint32_t eta);
std::pair<uint32_t, uint32_t> canonical_pair(const CanonicalFamily& fam, uint32_t eta, uint32_t s1,
                                             uint32_t s2);

}  // namespace derand::automata
