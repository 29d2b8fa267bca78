#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <memory>
#include <random>
#include <set>

#include "derand/automata.hpp"
#include "doctest.h"

using namespace derand;
using namespace derand::automata;

namespace {

BitString from_word(uint64_t v, int len) {
    BitString r = BitString::zeros(len);
    for (int j = 0; j < len; ++j)
        if ((v >> j) & 1) r.set(j, 1);
    return r;
}

CounterSpec pm1_spec(uint32_t m, uint32_t eta, int T) {
    CounterSpec c;
    c.m = m;
    c.eta = eta;
    c.T = T;
    c.inc.assign(m, std::vector<std::array<long, 2>>(static_cast<size_t>(T), {-1, 1}));
    return c;
}

AutomatonSystem random_full_system(std::mt19937_64& rng, uint32_t m, uint32_t eta, int T) {
    auto table = std::make_shared<std::vector<uint32_t>>(m * 2 * eta * static_cast<uint32_t>(T));
    for (auto& v : *table) v = static_cast<uint32_t>(rng() % eta);
    return make_system(m, eta, T, [table, eta, T](uint32_t i, int bit, uint32_t s, int t) {
        size_t idx = ((static_cast<size_t>(i) * 2 + static_cast<size_t>(bit)) * eta + s) *
                         static_cast<size_t>(T) +
                     static_cast<size_t>(t);
        return (*table)[idx];
    });
}

FooledDistribution random_distribution(std::mt19937_64& rng, const AutomatonSystem& sys, int t,
                                       int h, size_t count, TableKind kind) {
    std::vector<BitString> strings;
    for (size_t j = 0; j < count; ++j) strings.push_back(from_word(rng(), h));
    return make_distribution(sys, t, h, std::move(strings), kind);
}

}  // namespace

TEST_CASE("bit strings pack, compare, and concatenate") {
    BitString a = from_word(0b0110, 4);
    CHECK(a.bit(0) == 0);
    CHECK(a.bit(1) == 1);
    CHECK(a.bit(2) == 1);
    CHECK(a.bit(3) == 0);
    CHECK(to_string(a) == "0110");
    BitString b = from_word(0b1110, 4);
    CHECK(!lex_less(a, a));
    // they agree on times 0..2 and differ at time 3
    CHECK(lex_less(a, b));
    CHECK(!lex_less(b, a));
    BitString c = concat(a, b);
    CHECK(c.len == 8);
    CHECK(to_string(c) == "01100111");
    BitString long1 = from_word(0, 64);
    BitString long2 = concat(long1, from_word(1, 4));
    CHECK(long2.len == 68);
    CHECK(long2.bit(64) == 1);
    CHECK(lex_less(concat(long1, from_word(0, 4)), long2));
}

TEST_CASE("system construction validates its inputs") {
    auto id = [](uint32_t, int, uint32_t s, int) { return s; };
    CHECK_THROWS_AS(make_system(0, 2, 4, id), std::invalid_argument);
    CHECK_THROWS_AS(make_system(1, 2, 3, id), std::invalid_argument);
    CHECK_THROWS_AS(make_system(1, 2, 4, TransitionFn{}), std::invalid_argument);
    CounterSpec bad = pm1_spec(2, 5, 4);
    bad.inc.pop_back();
    CHECK_THROWS_AS(make_counter_system(bad), std::invalid_argument);
}

TEST_CASE("counter transitions wrap modulo the state count") {
    AutomatonSystem sys = make_counter_system(pm1_spec(1, 5, 4));
    CHECK(sys.F(0, 1, 2, 0) == 3);
    CHECK(sys.F(0, 0, 2, 1) == 1);
    CHECK(sys.F(0, 1, 4, 2) == 0);
    CHECK(sys.F(0, 0, 0, 3) == 4);
}

TEST_CASE("step tables follow strings and compose") {
    AutomatonSystem sys = make_counter_system(pm1_spec(1, 7, 8));
    SteppingTable ident = step_table(sys, BitString::zeros(0), 3);
    for (uint32_t s = 0; s < 7; ++s) CHECK(ident.map[0][s] == s);

    CounterSpec up;
    up.m = 1;
    up.eta = 7;
    up.T = 4;
    up.inc.assign(1, std::vector<std::array<long, 2>>(4, {0, 1}));
    AutomatonSystem upsys = make_counter_system(up);
    SteppingTable plus = step_table(upsys, from_word(1, 1), 0);
    for (uint32_t s = 0; s + 1 < 7; ++s) CHECK(plus.map[0][s] == s + 1);

    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        AutomatonSystem rs = random_full_system(rng, 2, 5, 16);
        int h1 = 1 + static_cast<int>(rng() % 5);
        int h2 = 1 + static_cast<int>(rng() % 5);
        int t = static_cast<int>(rng() % static_cast<uint64_t>(16 - h1 - h2));
        BitString r1 = from_word(rng(), h1);
        BitString r2 = from_word(rng(), h2);
        SteppingTable direct = step_table(rs, concat(r1, r2), t);
        SteppingTable split = compose_tables(step_table(rs, r1, t), step_table(rs, r2, t + h1));
        CHECK(direct.map == split.map);
        CHECK(direct.t == split.t);
        CHECK(direct.h == split.h);
    }
    SteppingTable a = step_table(sys, from_word(3, 2), 0);
    CHECK_THROWS_AS(compose_tables(a, a), std::invalid_argument);
}

TEST_CASE("err is zero on equal distributions and two on disjoint point masses") {
    AutomatonSystem sys = make_counter_system(pm1_spec(2, 9, 8));
    std::mt19937_64 rng(77);
    FooledDistribution d = random_distribution(rng, sys, 0, 4, 6, TableKind::counter);
    CHECK(err(sys, d, d) == Rat(0));

    FooledDistribution ones = make_distribution(sys, 0, 2, {from_word(3, 2)}, TableKind::counter);
    FooledDistribution zeros = make_distribution(sys, 0, 2, {from_word(0, 2)}, TableKind::counter);
    CHECK(err(sys, ones, zeros) == Rat(2));
}

TEST_CASE("err agrees with a naive recomputation and mixes table kinds") {
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 15; ++rep) {
        uint32_t eta = 2 + static_cast<uint32_t>(rng() % 4);
        CounterSpec c = pm1_spec(2, eta, 8);
        for (auto& row : c.inc)
            for (auto& e : row) e = {static_cast<long>(rng() % 5) - 2, static_cast<long>(rng() % 5) - 2};
        AutomatonSystem sys = make_counter_system(c);
        int h = 2 + static_cast<int>(rng() % 3);
        FooledDistribution a = random_distribution(rng, sys, 1, h, 3 + rng() % 4, TableKind::counter);
        FooledDistribution b = random_distribution(rng, sys, 1, h, 3 + rng() % 4, TableKind::counter);
        FooledDistribution af = make_distribution(sys, 1, h, a.strings, TableKind::full);
        FooledDistribution bf = make_distribution(sys, 1, h, b.strings, TableKind::full);

        Rat naive;
        for (uint32_t i = 0; i < sys.m; ++i)
            for (uint32_t s = 0; s < sys.eta; ++s) {
                Rat tot;
                for (uint32_t v = 0; v < sys.eta; ++v) {
                    Rat pa, pb;
                    for (size_t idx = 0; idx < a.strings.size(); ++idx)
                        if (apply_table(sys, a, idx, i, s) == v)
                            pa += Rat(1, static_cast<unsigned long>(a.strings.size()));
                    for (size_t idx = 0; idx < b.strings.size(); ++idx)
                        if (apply_table(sys, b, idx, i, s) == v)
                            pb += Rat(1, static_cast<unsigned long>(b.strings.size()));
                    tot += abs(pa - pb);
                }
                naive = std::max(naive, tot);
            }
        CHECK(err(sys, a, b) == naive);
        CHECK(err(sys, af, bf) == naive);
        CHECK(err(sys, a, bf) == naive);
        CHECK(err(sys, af, b) == naive);
    }
}

TEST_CASE("uniform marginals match hand values and exhaustive enumeration") {
    AutomatonSystem sys = make_counter_system(pm1_spec(1, 9, 8));
    auto point = uniform_marginals(sys, 2, 0);
    for (uint32_t s = 0; s < 9; ++s)
        for (uint32_t v = 0; v < 9; ++v) CHECK(point[0][s][v] == (s == v ? Rat(1) : Rat(0)));

    auto two = uniform_marginals(sys, 0, 2);
    CHECK(two[0][4][2] == Rat(1, 4));
    CHECK(two[0][4][4] == Rat(1, 2));
    CHECK(two[0][4][6] == Rat(1, 4));
    CHECK(two[0][4][5] == Rat(0));

    std::mt19937_64 rng(55);
    for (int rep = 0; rep < 6; ++rep) {
        AutomatonSystem rs = random_full_system(rng, 2, 4, 8);
        int h = static_cast<int>(rng() % 7);
        int t = static_cast<int>(rng() % static_cast<uint64_t>(8 - h + 1));
        FooledDistribution all = enumerate_uniform(rs, t, h, TableKind::full);
        CHECK(err_uniform(rs, all) == Rat(0));
    }
    AutomatonSystem cs = make_counter_system(pm1_spec(2, 5, 8));
    FooledDistribution all = enumerate_uniform(cs, 0, 6, TableKind::counter);
    CHECK(err_uniform(cs, all) == Rat(0));
}

TEST_CASE("canonical families reduce pairs and reconstruct transitions") {
    AutomatonSystem sys = make_counter_system(pm1_spec(1, 9, 8));
    CanonicalFamily counter = canonical_counter(sys);
    CanonicalFamily full = canonical_full(sys);
    std::mt19937_64 rng(5);
    AutomatonSystem plain = random_full_system(rng, 1, 3, 4);
    CHECK_THROWS_AS(canonical_counter(plain), std::invalid_argument);

    CHECK(canonical_pair(counter, 9, 5, 7) == std::pair<uint32_t, uint32_t>{0, 2});
    CHECK(canonical_pair(counter, 9, 7, 5) == std::pair<uint32_t, uint32_t>{2, 0});
    CHECK(canonical_pair(full, 9, 7, 5) == std::pair<uint32_t, uint32_t>{7, 5});

    CHECK(family_cost(counter, 9) == 17);
    CHECK(family_cost(full, 9) == 81);
    auto cpairs = enumerate_canonical(counter, 9);
    CHECK(cpairs.size() == 17);
    for (const auto& p : cpairs) {
        CHECK(canonical_pair(counter, 9, p.first, p.second) == p);
        CHECK((p.first == 0 || p.second == 0));
    }
    CHECK(enumerate_canonical(full, 3).size() == 9);

    // canonical tables are offsets: they reproduce the full stepping table from any start
    for (uint64_t v = 0; v < 64; ++v) {
        BitString r = from_word(v, 6);
        SteppingTable st = step_table(sys, r, 1);
        FooledDistribution d = make_distribution(sys, 1, 6, {r}, TableKind::counter);
        for (uint32_t s = 0; s < sys.eta; ++s) CHECK(apply_table(sys, d, 0, 0, s) == st.map[0][s]);
    }
}

TEST_CASE("equal canonical tables imply equal full tables and bounded reachability") {
    CounterSpec c = pm1_spec(1, 7, 8);
    c.inc[0][2] = {2, -3};
    c.inc[0][5] = {0, 4};
    AutomatonSystem sys = make_counter_system(c);
    FooledDistribution all = enumerate_uniform(sys, 0, 8, TableKind::counter);
    for (size_t a = 0; a < all.strings.size(); ++a)
        for (size_t b = a + 1; b < all.strings.size(); ++b)
            if (all.offsets[a] == all.offsets[b]) {
                SteppingTable ta = step_table(sys, all.strings[a], 0);
                SteppingTable tb = step_table(sys, all.strings[b], 0);
                CHECK(ta.map == tb.map);
            }

    CanonicalFamily fam = canonical_counter(sys);
    for (uint32_t s = 0; s < sys.eta; ++s) {
        std::set<uint32_t> reach;
        for (size_t idx = 0; idx < all.strings.size(); ++idx)
            reach.insert(apply_table(sys, all, idx, 0, s));
        CHECK(reach.size() <= family_cost(fam, sys.eta));
    }
}

TEST_CASE("err satisfies the triangle inequality and product subadditivity") {
    std::mt19937_64 rng(404);
    for (int rep = 0; rep < 10; ++rep) {
        uint32_t eta = 3 + static_cast<uint32_t>(rng() % 3);
        AutomatonSystem sys = random_full_system(rng, 2, eta, 8);
        FooledDistribution a = random_distribution(rng, sys, 0, 3, 4, TableKind::full);
        FooledDistribution b = random_distribution(rng, sys, 0, 3, 5, TableKind::full);
        FooledDistribution c = random_distribution(rng, sys, 0, 3, 3, TableKind::full);
        CHECK(err(sys, a, c) <= err(sys, a, b) + err(sys, b, c));

        FooledDistribution d1 = random_distribution(rng, sys, 0, 3, 4, TableKind::full);
        FooledDistribution d1p = random_distribution(rng, sys, 0, 3, 3, TableKind::full);
        FooledDistribution d2 = random_distribution(rng, sys, 3, 4, 3, TableKind::full);
        FooledDistribution d2p = random_distribution(rng, sys, 3, 4, 4, TableKind::full);
        auto product = [&](const FooledDistribution& x, const FooledDistribution& y) {
            std::vector<BitString> strings;
            for (const BitString& rx : x.strings)
                for (const BitString& ry : y.strings) strings.push_back(concat(rx, ry));
            return make_distribution(sys, x.t, x.h + y.h, std::move(strings), TableKind::full);
        };
        Rat lhs = err(sys, product(d1, d2), product(d1p, d2p));
        CHECK(lhs <= err(sys, d1, d1p) + err(sys, d2, d2p));
    }
}
