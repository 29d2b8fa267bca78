#include "derand/ensembles.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <stdexcept>

namespace derand {

namespace {

using codes::Word;

// Fixed coordinates are the low bit positions, so x <= y implies x>>s <= y>>s:
// entries sorted by codeword-as-integer keep every projection bucket contiguous.
bool word_less(const Word& a, const Word& b) {
    for (size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

bool shr_equal(const Word& a, const Word& b, int s) {
    size_t q = size_t(s) >> 6;
    int r = s & 63;
    for (size_t i = q + 1; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    if (q >= a.size()) return true;
    return (a[q] >> r) == (b[q] >> r);
}

bool parity_and(const Word& a, const Word& b) {
    uint64_t fold = 0;
    for (size_t i = 0; i < a.size(); ++i) fold ^= a[i] & b[i];
    return __builtin_parityll(fold);
}

// Bits f..f+ch-1 of cw, packed so that coordinate f+i lands at bit ch-1-i.
// Extension index v then enumerates the chunk in lexicographic bit order.
uint32_t extract_chunk(const Word& cw, int f, int ch) {
    uint32_t cb = 0;
    for (int i = 0; i < ch; ++i) {
        if (codes::get_bit(cw, f + i)) cb |= 1u << (ch - 1 - i);
    }
    return cb;
}

struct Ent {
    Word cw;
    Rat wt;
    uint8_t side;
    uint8_t basepar = 0;
    uint32_t cb = 0;
};

// Sum of (side1 signed mass) * (side2 signed mass) per contiguous equal-key run
// for every chunk extension v; signs are basepar xor <v, chunkbits>.
void sweep_stage(std::vector<Ent>& ents, int f, int ch, std::vector<Rat>& totals) {
    int nv = 1 << ch;
    int shift = f + ch;
    for (Ent& e : ents) e.cb = extract_chunk(e.cw, f, ch);
    std::vector<Rat> sums[2]{std::vector<Rat>(nv), std::vector<Rat>(nv)};
    std::vector<uint8_t> seen(nv, 0);
    std::vector<uint32_t> dirty;
    Rat a, b, term;
    size_t i = 0, n = ents.size();
    while (i < n) {
        size_t j = i + 1;
        while (j < n && shr_equal(ents[i].cw, ents[j].cw, shift)) ++j;
        dirty.clear();
        for (size_t k = i; k < j; ++k) {
            const Ent& e = ents[k];
            if (!seen[e.cb]) {
                seen[e.cb] = 1;
                dirty.push_back(e.cb);
            }
            Rat& slot = sums[e.side][e.cb];
            if (e.basepar)
                slot -= e.wt;
            else
                slot += e.wt;
        }
        for (int v = 0; v < nv; ++v) {
            a = 0;
            b = 0;
            for (uint32_t cb : dirty) {
                bool neg = __builtin_parity(uint32_t(v) & cb);
                if (neg) {
                    a -= sums[0][cb];
                    b -= sums[1][cb];
                } else {
                    a += sums[0][cb];
                    b += sums[1][cb];
                }
            }
            term = a * b;
            totals[v] += term;
        }
        for (uint32_t cb : dirty) {
            sums[0][cb] = 0;
            sums[1][cb] = 0;
            seen[cb] = 0;
        }
        i = j;
    }
}

}  // namespace

void WeightedFamily::canonicalize() {
    for (auto& [set, wt] : entries) {
        std::sort(set.begin(), set.end());
        if (std::adjacent_find(set.begin(), set.end()) != set.end())
            throw std::invalid_argument("duplicate ground id in a support set");
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<std::vector<uint32_t>, Rat>> merged;
    for (auto& e : entries) {
        if (!merged.empty() && merged.back().first == e.first)
            merged.back().second += e.second;
        else
            merged.push_back(std::move(e));
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const auto& e) { return e.second == 0; }),
                 merged.end());
    entries = std::move(merged);
}

Rat eval_T(const Ensemble& e) {
    std::map<std::vector<uint32_t>, Rat> lhs;
    for (const auto& [set, wt] : e.side1.entries) {
        std::vector<uint32_t> ids = set;
        std::sort(ids.begin(), ids.end());
        lhs[ids] += wt;
    }
    Rat t = 0;
    for (const auto& [set, wt] : e.side2.entries) {
        std::vector<uint32_t> ids = set;
        std::sort(ids.begin(), ids.end());
        auto it = lhs.find(ids);
        if (it != lhs.end()) t += it->second * wt;
    }
    return t;
}

Rat eval_S_direct(const Ensemble& e, const std::vector<uint8_t>& x) {
    auto set_parity = [&](const std::vector<uint32_t>& set) {
        int p = 0;
        for (uint32_t id : set) p ^= x.at(id) & 1;
        return p;
    };
    Rat s = 0;
    for (const auto& [e1, w1] : e.side1.entries) {
        int p1 = set_parity(e1);
        for (const auto& [e2, w2] : e.side2.entries) {
            if (p1 ^ set_parity(e2))
                s -= w1 * w2;
            else
                s += w1 * w2;
        }
    }
    return s;
}

Rat grouped_conditional_expectation(const std::vector<Ensemble>& ensembles,
                                    const codes::BinaryCode& code, const Prefix& prefix) {
    if (!codes::verify_fools(code, ensembles))
        throw std::invalid_argument("code does not separate support sets");
    int len = prefix.len();
    if (len > code.length) throw std::invalid_argument("prefix longer than code");
    Word pw(codes::word_count(code.length), 0);
    for (int c = 0; c < len; ++c) {
        if (prefix.bits[c] & 1) codes::set_bit(pw, c);
    }
    Rat total = 0;
    for (const Ensemble& e : ensembles) {
        struct Proj {
            Word cw;
            Rat swt;
            uint8_t side;
        };
        std::vector<Proj> ps;
        uint8_t side = 0;
        for (const WeightedFamily* fam : {&e.side1, &e.side2}) {
            for (const auto& [set, wt] : fam->entries) {
                Word cw = codes::encode_set(code, set);
                Rat swt = parity_and(cw, pw) ? -wt : wt;
                ps.push_back({std::move(cw), std::move(swt), side});
            }
            side = 1;
        }
        std::sort(ps.begin(), ps.end(), [&](const Proj& a, const Proj& b) {
            if (!shr_equal(a.cw, b.cw, len)) return word_less(a.cw, b.cw);
            return a.side < b.side;
        });
        size_t i = 0;
        while (i < ps.size()) {
            size_t j = i + 1;
            while (j < ps.size() && shr_equal(ps[i].cw, ps[j].cw, len)) ++j;
            Rat a = 0, b = 0;
            for (size_t k = i; k < j; ++k) {
                if (ps[k].side == 0)
                    a += ps[k].swt;
                else
                    b += ps[k].swt;
            }
            total += a * b;
            i = j;
        }
    }
    return total;
}

SearchResult lattice_search(const std::vector<Ensemble>& ensembles,
                            const codes::BinaryCode& code, const SearchOptions& opts) {
    if (!codes::verify_fools(code, ensembles))
        throw std::logic_error("code does not separate support sets");
    const int L = code.length;
    int ch_max = opts.chunk > 0 ? std::min(opts.chunk, L) : std::min(4, L);

    std::vector<std::vector<Ent>> ents(ensembles.size());
    for (size_t j = 0; j < ensembles.size(); ++j) {
        uint8_t side = 0;
        for (const WeightedFamily* fam : {&ensembles[j].side1, &ensembles[j].side2}) {
            for (const auto& [set, wt] : fam->entries)
                ents[j].push_back({codes::encode_set(code, set), wt, side});
            side = 1;
        }
        std::sort(ents[j].begin(), ents[j].end(), [](const Ent& a, const Ent& b) {
            if (a.cw != b.cw) return word_less(a.cw, b.cw);
            return a.side < b.side;
        });
    }

    SearchResult res;
    Rat cur = 0;
    for (auto& es : ents) {
        size_t i = 0;
        while (i < es.size()) {
            size_t j = i + 1;
            while (j < es.size() && es[i].cw == es[j].cw) ++j;
            Rat a = 0, b = 0;
            for (size_t k = i; k < j; ++k) {
                if (es[k].side == 0)
                    a += es[k].wt;
                else
                    b += es[k].wt;
            }
            cur += a * b;
            i = j;
        }
    }
    res.trace.push_back(cur);

    Word y(codes::word_count(L), 0);
    int nthreads = std::max(1, opts.threads);
    int f = 0;
    while (f < L) {
        int ch = std::min(ch_max, L - f);
        int nv = 1 << ch;
        std::vector<Rat> totals(nv);
        if (nthreads > 1 && ents.size() > 1) {
            size_t n = ents.size();
            size_t tcount = std::min<size_t>(nthreads, n);
            std::vector<std::future<std::vector<Rat>>> futs;
            for (size_t t = 0; t < tcount; ++t) {
                futs.push_back(std::async(std::launch::async, [&, t] {
                    std::vector<Rat> part(nv);
                    for (size_t j = n * t / tcount; j < n * (t + 1) / tcount; ++j)
                        sweep_stage(ents[j], f, ch, part);
                    return part;
                }));
            }
            for (auto& fu : futs) {
                std::vector<Rat> part = fu.get();
                for (int v = 0; v < nv; ++v) totals[v] += part[v];
            }
        } else {
            for (auto& es : ents) sweep_stage(es, f, ch, totals);
        }

        // Total expectation over the uniform chunk: the stage average must equal
        // the incoming value exactly, which also forces max >= incoming.
        Rat mean = 0;
        for (const Rat& t : totals) mean += t;
        mean /= nv;
        if (mean != cur) throw std::logic_error("stage average drifted from conditional expectation");

        int best = 0;
        for (int v = 1; v < nv; ++v) {
            if (totals[v] > totals[best]) best = v;
        }
        if (totals[best] < cur) throw std::logic_error("conditional expectation decreased");
        cur = totals[best];
        res.trace.push_back(cur);
        for (int i = 0; i < ch; ++i) {
            if ((best >> (ch - 1 - i)) & 1) codes::set_bit(y, f + i);
        }
        for (auto& es : ents) {
            for (Ent& e : es) e.basepar ^= __builtin_parity(uint32_t(best) & e.cb);
        }
        f += ch;
    }

    res.y.resize(L);
    for (int c = 0; c < L; ++c) res.y[c] = codes::get_bit(y, c);
    res.x.resize(code.ground_size());
    for (size_t id = 0; id < code.ground_size(); ++id)
        res.x[id] = parity_and(code.words[id], y);
    return res;
}

}  // namespace derand
