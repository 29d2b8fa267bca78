#include "derand/automata.hpp"

#include <algorithm>
#include <stdexcept>

namespace derand::automata {

BitString BitString::zeros(int len) {
    if (len < 0) throw std::invalid_argument("negative string length");
    BitString r;
    r.len = len;
    r.w.assign((static_cast<size_t>(len) + 63) / 64, 0);
    return r;
}

void BitString::set(int t, int v) {
    uint64_t bit = uint64_t{1} << (t % 64);
    if (v)
        w[static_cast<size_t>(t) / 64] |= bit;
    else
        w[static_cast<size_t>(t) / 64] &= ~bit;
}

bool lex_less(const BitString& a, const BitString& b) {
    if (a.len != b.len) throw std::invalid_argument("length mismatch in string comparison");
    for (size_t k = 0; k < a.w.size(); ++k) {
        uint64_t diff = a.w[k] ^ b.w[k];
        if (diff) {
            // earliest time step sits at the lowest differing bit
            int pos = __builtin_ctzll(diff);
            return ((a.w[k] >> pos) & 1) == 0;
        }
    }
    return false;
}

BitString concat(const BitString& a, const BitString& b) {
    BitString r = BitString::zeros(a.len + b.len);
    r.w = a.w;
    r.w.resize((static_cast<size_t>(r.len) + 63) / 64, 0);
    for (int t = 0; t < b.len; ++t)
        if (b.bit(t)) r.set(a.len + t, 1);
    return r;
}

std::string to_string(const BitString& r) {
    std::string s(static_cast<size_t>(r.len), '0');
    for (int t = 0; t < r.len; ++t)
        if (r.bit(t)) s[static_cast<size_t>(t)] = '1';
    return s;
}

AutomatonSystem make_system(uint32_t m, uint32_t eta, int T, TransitionFn F) {
    if (m == 0 || eta == 0) throw std::invalid_argument("empty automaton system");
    if (T < 1 || (T & (T - 1)) != 0) throw std::invalid_argument("horizon must be a power of two");
    if (!F) throw std::invalid_argument("missing transition function");
    AutomatonSystem sys;
    sys.m = m;
    sys.eta = eta;
    sys.T = T;
    sys.F = std::move(F);
    return sys;
}

AutomatonSystem make_counter_system(CounterSpec spec) {
    if (spec.inc.size() != spec.m) throw std::invalid_argument("increment table has wrong row count");
    for (const auto& row : spec.inc)
        if (row.size() != static_cast<size_t>(spec.T))
            throw std::invalid_argument("increment table has wrong column count");
    long eta = static_cast<long>(spec.eta);
    AutomatonSystem sys =
        make_system(spec.m, spec.eta, spec.T,
                    [spec, eta](uint32_t i, int bit, uint32_t s, int t) -> uint32_t {
                        long step = spec.inc[i][static_cast<size_t>(t)][static_cast<size_t>(bit)];
                        long v = (static_cast<long>(s) + step % eta + eta) % eta;
                        return static_cast<uint32_t>(v);
                    });
    sys.counter = std::move(spec);
    return sys;
}

SteppingTable step_table(const AutomatonSystem& sys, const BitString& r, int t) {
    if (t < 0 || t + r.len > sys.T) throw std::invalid_argument("window exceeds the horizon");
    SteppingTable out;
    out.t = t;
    out.h = r.len;
    out.map.assign(sys.m, std::vector<uint32_t>(sys.eta));
    for (uint32_t i = 0; i < sys.m; ++i)
        for (uint32_t s = 0; s < sys.eta; ++s) {
            uint32_t cur = s;
            for (int j = 0; j < r.len; ++j) cur = sys.F(i, r.bit(j), cur, t + j);
            if (cur >= sys.eta) throw std::logic_error("transition left the state space");
            out.map[i][s] = cur;
        }
    return out;
}

SteppingTable compose_tables(const SteppingTable& a, const SteppingTable& b) {
    if (a.t + a.h != b.t) throw std::invalid_argument("windows do not abut");
    if (a.map.size() != b.map.size()) throw std::invalid_argument("automaton count mismatch");
    SteppingTable out;
    out.t = a.t;
    out.h = a.h + b.h;
    out.map.assign(a.map.size(), {});
    for (size_t i = 0; i < a.map.size(); ++i) {
        out.map[i].resize(a.map[i].size());
        for (size_t s = 0; s < a.map[i].size(); ++s) out.map[i][s] = b.map[i][a.map[i][s]];
    }
    return out;
}

FooledDistribution make_distribution(const AutomatonSystem& sys, int t, int h,
                                     std::vector<BitString> strings, TableKind kind) {
    if (strings.empty()) throw std::invalid_argument("empty distribution");
    if (kind == TableKind::counter && !sys.counter)
        throw std::invalid_argument("counter tables need a counter system");
    FooledDistribution d;
    d.t = t;
    d.h = h;
    d.kind = kind;
    d.strings = std::move(strings);
    if (kind == TableKind::full) {
        d.tables.reserve(d.strings.size());
        for (const BitString& r : d.strings) {
            if (r.len != h) throw std::invalid_argument("string length differs from the window");
            d.tables.push_back(step_table(sys, r, t));
        }
    } else {
        const CounterSpec& c = *sys.counter;
        long eta = static_cast<long>(c.eta);
        d.offsets.reserve(d.strings.size());
        d.true_offsets.reserve(d.strings.size());
        for (const BitString& r : d.strings) {
            if (r.len != h) throw std::invalid_argument("string length differs from the window");
            std::vector<uint32_t> off(c.m);
            std::vector<long> tru(c.m);
            for (uint32_t i = 0; i < c.m; ++i) {
                long sum = 0;
                for (int j = 0; j < h; ++j)
                    sum += c.inc[i][static_cast<size_t>(t + j)][static_cast<size_t>(r.bit(j))];
                tru[i] = sum;
                off[i] = static_cast<uint32_t>((sum % eta + eta) % eta);
            }
            d.offsets.push_back(std::move(off));
            d.true_offsets.push_back(std::move(tru));
        }
    }
    return d;
}

FooledDistribution enumerate_uniform(const AutomatonSystem& sys, int t, int h, TableKind kind) {
    if (h < 0 || h > 20) throw std::invalid_argument("enumeration window too large");
    std::vector<BitString> strings;
    strings.reserve(size_t{1} << h);
    for (uint64_t v = 0; v < (uint64_t{1} << h); ++v) {
        BitString r = BitString::zeros(h);
        for (int j = 0; j < h; ++j)
            if ((v >> j) & 1) r.set(j, 1);
        strings.push_back(std::move(r));
    }
    return make_distribution(sys, t, h, std::move(strings), kind);
}

uint32_t apply_table(const AutomatonSystem& sys, const FooledDistribution& d, size_t idx,
                     uint32_t i, uint32_t s) {
    if (d.kind == TableKind::full) return d.tables[idx].map[i][s];
    return (s + d.offsets[idx][i]) % sys.eta;
}

namespace {

// end-state counts per (i, s): [i][s][s'], one count per multiset element
std::vector<std::vector<std::vector<uint64_t>>> end_counts(const AutomatonSystem& sys,
                                                           const FooledDistribution& d) {
    std::vector<std::vector<std::vector<uint64_t>>> c(
        sys.m, std::vector<std::vector<uint64_t>>(sys.eta, std::vector<uint64_t>(sys.eta, 0)));
    for (size_t idx = 0; idx < d.strings.size(); ++idx)
        for (uint32_t i = 0; i < sys.m; ++i) {
            if (d.kind == TableKind::counter) {
                uint32_t off = d.offsets[idx][i];
                for (uint32_t s = 0; s < sys.eta; ++s) ++c[i][s][(s + off) % sys.eta];
            } else {
                for (uint32_t s = 0; s < sys.eta; ++s) ++c[i][s][d.tables[idx].map[i][s]];
            }
        }
    return c;
}

}  // namespace

Rat err(const AutomatonSystem& sys, const FooledDistribution& a, const FooledDistribution& b) {
    if (a.t != b.t || a.h != b.h) throw std::invalid_argument("window mismatch in err");
    Int na(static_cast<unsigned long>(a.strings.size()));
    Int nb(static_cast<unsigned long>(b.strings.size()));
    if (a.kind == TableKind::counter && b.kind == TableKind::counter) {
        // cyclic shifts make the L1 distance start-independent
        Int best = 0;
        for (uint32_t i = 0; i < sys.m; ++i) {
            std::vector<uint64_t> ha(sys.eta, 0), hb(sys.eta, 0);
            for (const auto& off : a.offsets) ++ha[off[i]];
            for (const auto& off : b.offsets) ++hb[off[i]];
            Int tot = 0;
            for (uint32_t v = 0; v < sys.eta; ++v)
                tot += abs(Int(static_cast<unsigned long>(ha[v])) * nb -
                           Int(static_cast<unsigned long>(hb[v])) * na);
            best = std::max(best, tot);
        }
        Rat r(best, na * nb);
        r.canonicalize();
        return r;
    }
    auto ca = end_counts(sys, a);
    auto cb = end_counts(sys, b);
    Int best = 0;
    for (uint32_t i = 0; i < sys.m; ++i)
        for (uint32_t s = 0; s < sys.eta; ++s) {
            Int tot = 0;
            for (uint32_t v = 0; v < sys.eta; ++v)
                tot += abs(Int(static_cast<unsigned long>(ca[i][s][v])) * nb -
                           Int(static_cast<unsigned long>(cb[i][s][v])) * na);
            best = std::max(best, tot);
        }
    Rat r(best, na * nb);
    r.canonicalize();
    return r;
}

std::vector<std::vector<std::vector<Rat>>> uniform_marginals(const AutomatonSystem& sys, int t,
                                                             int h) {
    if (t < 0 || h < 0 || t + h > sys.T) throw std::invalid_argument("window exceeds the horizon");
    Rat den = dyadic(1, static_cast<unsigned>(h));
    std::vector<std::vector<std::vector<Rat>>> out(sys.m);
    if (sys.counter) {
        // one offset DP per automaton, rotated per start state
        const CounterSpec& c = *sys.counter;
        for (uint32_t i = 0; i < sys.m; ++i) {
            std::vector<Int> cur(sys.eta, 0), next(sys.eta);
            cur[0] = 1;
            for (int j = 0; j < h; ++j) {
                std::fill(next.begin(), next.end(), 0);
                for (uint32_t s = 0; s < sys.eta; ++s) {
                    if (cur[s] == 0) continue;
                    for (int bit = 0; bit < 2; ++bit) {
                        long step = c.inc[i][static_cast<size_t>(t + j)][static_cast<size_t>(bit)];
                        long eta = static_cast<long>(sys.eta);
                        uint32_t v = static_cast<uint32_t>(
                            (static_cast<long>(s) + step % eta + eta) % eta);
                        next[v] += cur[s];
                    }
                }
                std::swap(cur, next);
            }
            out[i].assign(sys.eta, std::vector<Rat>(sys.eta));
            for (uint32_t s = 0; s < sys.eta; ++s)
                for (uint32_t off = 0; off < sys.eta; ++off)
                    out[i][s][(s + off) % sys.eta] = Rat(cur[off]) * den;
        }
        return out;
    }
    for (uint32_t i = 0; i < sys.m; ++i) {
        out[i].assign(sys.eta, std::vector<Rat>(sys.eta));
        for (uint32_t s0 = 0; s0 < sys.eta; ++s0) {
            std::vector<Int> cur(sys.eta, 0), next(sys.eta);
            cur[s0] = 1;
            for (int j = 0; j < h; ++j) {
                std::fill(next.begin(), next.end(), 0);
                for (uint32_t s = 0; s < sys.eta; ++s) {
                    if (cur[s] == 0) continue;
                    for (int bit = 0; bit < 2; ++bit) next[sys.F(i, bit, s, t + j)] += cur[s];
                }
                std::swap(cur, next);
            }
            for (uint32_t v = 0; v < sys.eta; ++v) out[i][s0][v] = Rat(cur[v]) * den;
        }
    }
    return out;
}

Rat err_uniform(const AutomatonSystem& sys, const FooledDistribution& d) {
    auto marg = uniform_marginals(sys, d.t, d.h);
    Rat w(1, static_cast<unsigned long>(d.strings.size()));
    w.canonicalize();
    Rat best;
    if (d.kind == TableKind::counter) {
        // both sides shift with the start state, so start 0 covers all starts
        for (uint32_t i = 0; i < sys.m; ++i) {
            std::vector<uint64_t> hist(sys.eta, 0);
            for (const auto& off : d.offsets) ++hist[off[i]];
            Rat tot;
            for (uint32_t off = 0; off < sys.eta; ++off)
                tot += abs(Rat(static_cast<unsigned long>(hist[off])) * w - marg[i][0][off]);
            best = std::max(best, tot);
        }
        return best;
    }
    auto counts = end_counts(sys, d);
    for (uint32_t i = 0; i < sys.m; ++i)
        for (uint32_t s = 0; s < sys.eta; ++s) {
            Rat tot;
            for (uint32_t v = 0; v < sys.eta; ++v)
                tot += abs(Rat(static_cast<unsigned long>(counts[i][s][v])) * w - marg[i][s][v]);
            best = std::max(best, tot);
        }
    return best;
}

CanonicalFamily canonical_full(const AutomatonSystem&) { return CanonicalFamily{TableKind::full}; }

CanonicalFamily canonical_counter(const AutomatonSystem& sys) {
    if (!sys.counter) throw std::invalid_argument("canonical counter family needs a counter system");
    return CanonicalFamily{TableKind::counter};
}

uint64_t family_cost(const CanonicalFamily& fam, uint32_t eta) {
    if (fam.kind == TableKind::full) return uint64_t{eta} * eta;
    return 2 * uint64_t{eta} - 1;
}

std::vector<std::pair<uint32_t, uint32_t>> enumerate_canonical(const CanonicalFamily& fam,
                                                               uint32_t eta) {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    if (fam.kind == TableKind::full) {
        for (uint32_t s1 = 0; s1 < eta; ++s1)
            for (uint32_t s2 = 0; s2 < eta; ++s2) out.emplace_back(s1, s2);
        return out;
    }
    for (uint32_t z = 0; z < eta; ++z) out.emplace_back(0, z);
    for (uint32_t z = 1; z < eta; ++z) out.emplace_back(z, 0);
    return out;
}

std::pair<uint32_t, uint32_t> canonical_pair(const CanonicalFamily& fam, uint32_t eta, uint32_t s1,
                                             uint32_t s2) {
    if (s1 >= eta || s2 >= eta) throw std::invalid_argument("state out of range");
    if (fam.kind == TableKind::full) return {s1, s2};
    if (s2 >= s1) return {0, s2 - s1};
    return {s1 - s2, 0};
}

}  // namespace derand::automata
