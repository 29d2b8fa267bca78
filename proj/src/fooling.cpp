#include "derand/fooling.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>

#include "derand/moments.hpp"

namespace derand::automata {

namespace {

bool is_pow2(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// counts stay meaningful far above any cap we ever select
constexpr uint64_t support_saturation = uint64_t(1) << 40;

uint64_t ceil_to_u64(const Rat& x) {
    if (x <= 0) return 0;
    Int num = x.get_num(), den = x.get_den(), q;
    mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (q > support_saturation) return support_saturation;
    return mpz_get_ui(q.get_mpz_t());
}

Rat make_frac(uint64_t num, uint64_t den) {
    Rat r(static_cast<unsigned long>(num), static_cast<unsigned long>(den));
    r.canonicalize();
    return r;
}

struct ClassId {
    uint32_t a = 0;
    uint32_t k1 = 0;  // counter: offset; full: start state
    uint32_t k2 = 0;  // full: end state
};

// Pairwise class-count oracle over z = (x index << b2) | y index. Counts for a
// partially fixed z come from the histogram of the free x range convolved with
// the free y range, so one scan serves every class and every variable of the
// stage; the cache is keyed by the prefix alone.
struct PairContext {
    TableKind kind = TableKind::counter;
    uint32_t m = 0, eta = 0;
    int b1 = 0, b2 = 0;
    std::vector<std::vector<uint32_t>> off1, off2;  // counter, [a][idx]
    std::vector<std::vector<uint64_t>> h2full;      // counter, y histogram per a
    std::vector<std::vector<std::vector<uint32_t>>> map1, map2;  // full, [a][idx][s]
    std::vector<std::vector<std::vector<uint64_t>>> c2full;      // full, [a][mid][end]

    struct Entry {
        int norm_log2 = 0;
        std::vector<std::vector<uint64_t>> ccnt;               // [a][offset]
        std::vector<std::vector<std::vector<uint64_t>>> fcnt;  // [a][s1][s2]
    };
    int cache_fixed = -1;
    std::map<uint64_t, Entry> cache;

    Entry build(int fixed, uint64_t prefix) const;
    const Entry& get(int fixed, uint64_t prefix);
};

PairContext::Entry PairContext::build(int fixed, uint64_t prefix) const {
    Entry e;
    e.norm_log2 = b1 + b2 - fixed;
    size_t x0, xn, y0, yn;
    if (fixed <= b1) {
        x0 = static_cast<size_t>(prefix) << (b1 - fixed);
        xn = size_t(1) << (b1 - fixed);
        y0 = 0;
        yn = size_t(1) << b2;
    } else {
        int g = fixed - b1;
        x0 = static_cast<size_t>(prefix >> g);
        xn = 1;
        y0 = static_cast<size_t>(prefix & ((uint64_t(1) << g) - 1)) << (b2 - g);
        yn = size_t(1) << (b2 - g);
    }
    bool full_y = fixed <= b1;
    if (kind == TableKind::counter) {
        e.ccnt.assign(m, std::vector<uint64_t>(eta, 0));
        std::vector<uint64_t> h1(eta), h2(eta);
        for (uint32_t a = 0; a < m; ++a) {
            std::fill(h1.begin(), h1.end(), 0);
            for (size_t x = x0; x < x0 + xn; ++x) ++h1[off1[a][x]];
            const std::vector<uint64_t>* hy = &h2full[a];
            if (!full_y) {
                std::fill(h2.begin(), h2.end(), 0);
                for (size_t y = y0; y < y0 + yn; ++y) ++h2[off2[a][y]];
                hy = &h2;
            }
            auto& out = e.ccnt[a];
            for (uint32_t da = 0; da < eta; ++da) {
                uint64_t ca = h1[da];
                if (!ca) continue;
                for (uint32_t db = 0; db < eta; ++db) {
                    uint64_t cb = (*hy)[db];
                    if (!cb) continue;
                    uint32_t s = da + db;
                    if (s >= eta) s -= eta;
                    out[s] += ca * cb;
                }
            }
        }
    } else {
        e.fcnt.assign(m, std::vector<std::vector<uint64_t>>(eta, std::vector<uint64_t>(eta, 0)));
        for (uint32_t a = 0; a < m; ++a) {
            std::vector<std::vector<uint64_t>> c1(eta, std::vector<uint64_t>(eta, 0));
            for (size_t x = x0; x < x0 + xn; ++x)
                for (uint32_t s = 0; s < eta; ++s) ++c1[s][map1[a][x][s]];
            std::vector<std::vector<uint64_t>> c2loc;
            const auto* cy = &c2full[a];
            if (!full_y) {
                c2loc.assign(eta, std::vector<uint64_t>(eta, 0));
                for (size_t y = y0; y < y0 + yn; ++y)
                    for (uint32_t s = 0; s < eta; ++s) ++c2loc[s][map2[a][y][s]];
                cy = &c2loc;
            }
            auto& out = e.fcnt[a];
            for (uint32_t s = 0; s < eta; ++s)
                for (uint32_t mid = 0; mid < eta; ++mid) {
                    uint64_t c = c1[s][mid];
                    if (!c) continue;
                    const auto& row = (*cy)[mid];
                    for (uint32_t en = 0; en < eta; ++en)
                        if (row[en]) out[s][en] += c * row[en];
                }
        }
    }
    return e;
}

const PairContext::Entry& PairContext::get(int fixed, uint64_t prefix) {
    if (fixed != cache_fixed) {
        cache.clear();
        cache_fixed = fixed;
    }
    auto it = cache.find(prefix);
    if (it == cache.end()) it = cache.emplace(prefix, build(fixed, prefix)).first;
    return it->second;
}

FooledDistribution selected_pairs(const FooledDistribution& d1, const FooledDistribution& d2,
                                  const std::vector<std::pair<size_t, size_t>>& sel, uint32_t m,
                                  uint32_t eta) {
    FooledDistribution out;
    out.t = d1.t;
    out.h = d1.h + d2.h;
    out.kind = d1.kind;
    out.strings.reserve(sel.size());
    for (auto [x, y] : sel) {
        out.strings.push_back(concat(d1.strings[x], d2.strings[y]));
        if (d1.kind == TableKind::counter) {
            std::vector<uint32_t> off(m);
            std::vector<long> tru(m);
            for (uint32_t a = 0; a < m; ++a) {
                uint32_t s = d1.offsets[x][a] + d2.offsets[y][a];
                off[a] = s >= eta ? s - eta : s;
                tru[a] = d1.true_offsets[x][a] + d2.true_offsets[y][a];
            }
            out.offsets.push_back(std::move(off));
            out.true_offsets.push_back(std::move(tru));
        } else {
            out.tables.push_back(compose_tables(d1.tables[x], d2.tables[y]));
        }
    }
    return out;
}

}  // namespace

ReduceResult reduce(const AutomatonSystem& sys, const FooledDistribution& d1,
                    const FooledDistribution& d2, const Rat& eps, const CanonicalFamily& fam,
                    const ReduceOptions& opts) {
    if (d1.kind != fam.kind || d2.kind != fam.kind)
        throw std::invalid_argument("table kind mismatch");
    if (d1.h <= 0 || d2.h <= 0) throw std::invalid_argument("empty window");
    if (d1.t + d1.h != d2.t) throw std::invalid_argument("windows do not abut");
    if (eps <= 0 || eps > 2) throw std::invalid_argument("eps must lie in (0, 2]");
    if (!is_pow2(opts.support_cap) || opts.product_cap == 0 ||
        opts.support_cap > opts.product_cap)
        throw std::invalid_argument("bad caps");
    size_t n1 = d1.strings.size(), n2 = d2.strings.size();
    if (!is_pow2(n1) || !is_pow2(n2)) throw std::invalid_argument("supports must be powers of two");
    int b1 = std::countr_zero(n1), b2 = std::countr_zero(n2);
    if (b1 + b2 > 60) throw std::invalid_argument("pair space too large");
    uint32_t m = sys.m, eta = sys.eta;
    bool counter = fam.kind == TableKind::counter;
    if (counter) {
        if (d1.offsets.size() != n1 || d1.true_offsets.size() != n1 || d2.offsets.size() != n2 ||
            d2.true_offsets.size() != n2)
            throw std::invalid_argument("missing counter offsets");
    } else {
        if (d1.tables.size() != n1 || d2.tables.size() != n2)
            throw std::invalid_argument("missing stepping tables");
    }

    auto ctx = std::make_shared<PairContext>();
    ctx->kind = fam.kind;
    ctx->m = m;
    ctx->eta = eta;
    ctx->b1 = b1;
    ctx->b2 = b2;
    if (counter) {
        ctx->off1.assign(m, std::vector<uint32_t>(n1));
        ctx->off2.assign(m, std::vector<uint32_t>(n2));
        ctx->h2full.assign(m, std::vector<uint64_t>(eta, 0));
        for (size_t x = 0; x < n1; ++x) {
            if (d1.offsets[x].size() != m || d1.true_offsets[x].size() != m)
                throw std::invalid_argument("offset row shape mismatch");
            for (uint32_t a = 0; a < m; ++a) {
                uint32_t v = d1.offsets[x][a];
                if (v >= eta) throw std::invalid_argument("offset outside the state space");
                ctx->off1[a][x] = v;
            }
        }
        for (size_t y = 0; y < n2; ++y) {
            if (d2.offsets[y].size() != m || d2.true_offsets[y].size() != m)
                throw std::invalid_argument("offset row shape mismatch");
            for (uint32_t a = 0; a < m; ++a) {
                uint32_t v = d2.offsets[y][a];
                if (v >= eta) throw std::invalid_argument("offset outside the state space");
                ctx->off2[a][y] = v;
                ++ctx->h2full[a][v];
            }
        }
    } else {
        ctx->map1.assign(m, std::vector<std::vector<uint32_t>>(n1));
        ctx->map2.assign(m, std::vector<std::vector<uint32_t>>(n2));
        ctx->c2full.assign(m, std::vector<std::vector<uint64_t>>(eta, std::vector<uint64_t>(eta, 0)));
        for (size_t x = 0; x < n1; ++x) {
            if (d1.tables[x].map.size() != m) throw std::invalid_argument("table shape mismatch");
            for (uint32_t a = 0; a < m; ++a) {
                if (d1.tables[x].map[a].size() != eta)
                    throw std::invalid_argument("table shape mismatch");
                ctx->map1[a][x] = d1.tables[x].map[a];
            }
        }
        for (size_t y = 0; y < n2; ++y) {
            if (d2.tables[y].map.size() != m) throw std::invalid_argument("table shape mismatch");
            for (uint32_t a = 0; a < m; ++a) {
                if (d2.tables[y].map[a].size() != eta)
                    throw std::invalid_argument("table shape mismatch");
                ctx->map2[a][y] = d2.tables[y].map[a];
                for (uint32_t s = 0; s < eta; ++s) ++ctx->c2full[a][s][d2.tables[y].map[a][s]];
            }
        }
    }

    // class probabilities of the exact pairwise product
    PairContext::Entry root = ctx->build(0, 0);
    uint64_t total = uint64_t(n1) * n2;
    std::vector<ClassId> cls;
    std::vector<Rat> pc;
    std::vector<uint64_t> etag;
    Rat sum_req = 0;
    if (counter) {
        for (uint32_t a = 0; a < m; ++a) {
            uint64_t g = 0;
            for (uint32_t d = 0; d < eta; ++d)
                if (root.ccnt[a][d]) ++g;
            for (uint32_t d = 0; d < eta; ++d) {
                uint64_t c = root.ccnt[a][d];
                if (!c || c == total) continue;
                cls.push_back({a, d, 0});
                pc.push_back(make_frac(c, total));
                etag.push_back(g);
                sum_req += Rat(static_cast<unsigned long>(g)) * (1 - pc.back());
            }
        }
    } else {
        for (uint32_t a = 0; a < m; ++a)
            for (uint32_t s1 = 0; s1 < eta; ++s1) {
                uint64_t g = 0;
                for (uint32_t s2 = 0; s2 < eta; ++s2)
                    if (root.fcnt[a][s1][s2]) ++g;
                for (uint32_t s2 = 0; s2 < eta; ++s2) {
                    uint64_t c = root.fcnt[a][s1][s2];
                    if (!c || c == total) continue;
                    cls.push_back({a, s1, s2});
                    pc.push_back(make_frac(c, total));
                    etag.push_back(g);
                    sum_req += Rat(static_cast<unsigned long>(g)) * (1 - pc.back());
                }
            }
    }

    ReduceReport rep;
    rep.eps = eps;
    rep.classes = cls.size();
    rep.err_each.assign(m, Rat(0));
    rep.e_required = ceil_to_u64(2 * sum_req / (eps * eps));
    uint64_t e_pow2 = std::bit_ceil(std::max<uint64_t>(rep.e_required, 1));
    uint64_t product = total;

    if (product <= e_pow2 && product <= opts.product_cap) {
        std::vector<std::pair<size_t, size_t>> sel;
        sel.reserve(product);
        for (size_t x = 0; x < n1; ++x)
            for (size_t y = 0; y < n2; ++y) sel.emplace_back(x, y);
        rep.product_fallback = true;
        rep.e_used = product;
        rep.err_measured = 0;
        rep.certified = true;
        rep.apriori = true;
        return {selected_pairs(d1, d2, sel, m, eta), rep};
    }

    uint64_t e_used = std::min(e_pow2, opts.support_cap);
    rep.e_used = e_used;
    rep.capped = e_used < e_pow2;
    Rat e_rat(static_cast<unsigned long>(e_used));

    std::vector<std::pair<size_t, size_t>> sel(e_used);
    uint64_t ymask = (uint64_t(1) << b2) - 1;
    if (cls.empty()) {
        // every class is certain; any pair multiset matches the product classes
        for (uint64_t v = 0; v < e_used; ++v) {
            uint64_t z = v % product;
            sel[v] = {static_cast<size_t>(z >> b2), static_cast<size_t>(z & ymask)};
        }
        rep.expected_s = 0;
        rep.achieved_s = 0;
    } else {
        MomentSystem ms;
        ms.n = static_cast<uint32_t>(e_used);
        ms.bits = b1 + b2;
        for (size_t j = 0; j < cls.size(); ++j) {
            Rat tol_sq =
                e_rat * e_rat * eps * eps * pc[j] / Rat(static_cast<unsigned long>(etag[j]));
            ms.functionals.push_back(chebyshev_functional_sq(e_rat * pc[j], tol_sq));
        }
        Peo peo = [ctx, cls](uint32_t j, uint32_t, int s, int fixed, uint64_t prefix) -> Rat {
            if (s < 1) throw std::invalid_argument("indicator powers start at one");
            const auto& e = ctx->get(fixed, prefix);
            const ClassId& c = cls[j];
            uint64_t cnt = ctx->kind == TableKind::counter ? e.ccnt[c.a][c.k1]
                                                           : e.fcnt[c.a][c.k1][c.k2];
            return make_frac(cnt, uint64_t(1) << e.norm_log2);
        };
        EngineOptions eo;
        eo.search.chunk = opts.chunk;
        eo.search.threads = opts.threads;
        MomentResult mres = minimize_system(ms, peo, eo);
        Rat closed = sum_req / (e_rat * eps * eps);
        if (mres.expectation != closed) throw std::logic_error("class expectation mismatch");
        if (!rep.capped && closed >= 1) throw std::logic_error("expectation bound violated");
        rep.expected_s = closed;
        rep.achieved_s = mres.value;
        for (uint64_t v = 0; v < e_used; ++v) {
            uint64_t z = mres.x[v];
            sel[v] = {static_cast<size_t>(z >> b2), static_cast<size_t>(z & ymask)};
        }
    }

    ReduceResult res{selected_pairs(d1, d2, sel, m, eta), rep};
    auto& out = res.dist;
    auto& r = res.report;
    if (counter) {
        std::vector<uint64_t> selcnt(eta);
        for (uint32_t a = 0; a < m; ++a) {
            std::fill(selcnt.begin(), selcnt.end(), 0);
            for (size_t v = 0; v < out.offsets.size(); ++v) ++selcnt[out.offsets[v][a]];
            Rat err_a = 0;
            for (uint32_t d = 0; d < eta; ++d)
                err_a += abs(make_frac(selcnt[d], e_used) - make_frac(root.ccnt[a][d], total));
            r.err_each[a] = err_a;
        }
    } else {
        std::vector<uint64_t> selcnt(eta);
        for (uint32_t a = 0; a < m; ++a) {
            Rat worst = 0;
            for (uint32_t s1 = 0; s1 < eta; ++s1) {
                std::fill(selcnt.begin(), selcnt.end(), 0);
                for (size_t v = 0; v < out.tables.size(); ++v) ++selcnt[out.tables[v].map[a][s1]];
                Rat err_s = 0;
                for (uint32_t s2 = 0; s2 < eta; ++s2)
                    err_s +=
                        abs(make_frac(selcnt[s2], e_used) - make_frac(root.fcnt[a][s1][s2], total));
                worst = std::max(worst, err_s);
            }
            r.err_each[a] = worst;
        }
    }
    r.err_measured = 0;
    for (const Rat& e : r.err_each) r.err_measured = std::max(r.err_measured, e);
    r.certified = r.err_measured <= eps;
    r.apriori = r.achieved_s < 1;
    if (r.apriori && !r.certified) throw std::logic_error("certified selection exceeded budget");
    return res;
}

FooledDistribution shift_window(FooledDistribution d, int t) {
    d.t = t;
    for (auto& tab : d.tables) tab.t = t;
    return d;
}

uint64_t fool_support_bound(const AutomatonSystem& sys, const Rat& eps,
                            const CanonicalFamily& fam) {
    if (eps <= 0 || eps > 2) throw std::invalid_argument("eps must lie in (0, 2]");
    Rat b = Rat(static_cast<unsigned long>(2 * sys.m)) *
            Rat(static_cast<unsigned long>(family_cost(fam, sys.eta))) / (eps * eps);
    return std::max<uint64_t>(ceil_to_u64(b), 1);
}

namespace {

FoolResult fool_impl(const AutomatonSystem& sys, int t, int h, const Rat& eps,
                     const CanonicalFamily& fam, const ReduceOptions& opts) {
    FoolResult res;
    if (h == 1) {
        res.dist = enumerate_uniform(sys, t, 1, fam.kind);
        res.err_each.assign(sys.m, Rat(0));
        res.err_bound = 0;
        return res;
    }
    int half = h / 2;
    Rat child_eps = (eps / 2) * (1 - make_frac(1, static_cast<uint64_t>(h)));
    FoolResult c1 = fool_impl(sys, t, half, child_eps, fam, opts);
    FoolResult c2 = fool_impl(sys, t + half, half, child_eps, fam, opts);
    ReduceResult rr = reduce(sys, c1.dist, c2.dist, eps / Rat(static_cast<unsigned long>(h)), fam,
                             opts);
    res.dist = std::move(rr.dist);
    res.err_each.assign(sys.m, Rat(0));
    for (uint32_t a = 0; a < sys.m; ++a)
        res.err_each[a] = rr.report.err_each[a] + c1.err_each[a] + c2.err_each[a];
    res.err_bound = 0;
    for (const Rat& e : res.err_each) res.err_bound = std::max(res.err_bound, e);
    res.nodes = std::move(c1.nodes);
    res.nodes.insert(res.nodes.end(), std::make_move_iterator(c2.nodes.begin()),
                     std::make_move_iterator(c2.nodes.end()));
    res.nodes.push_back({t, h, std::move(rr.report)});
    return res;
}

}  // namespace

FoolResult fool(const AutomatonSystem& sys, int t, int h, const Rat& eps,
                const CanonicalFamily& fam, const ReduceOptions& opts) {
    if (t < 0 || h < 1 || !is_pow2(static_cast<uint64_t>(h)) || t + h > sys.T)
        throw std::invalid_argument("bad window");
    if (eps <= 0 || eps > 2) throw std::invalid_argument("eps must lie in (0, 2]");
    if (fam.kind == TableKind::counter && !sys.counter)
        throw std::invalid_argument("counter family needs a counter system");
    FoolResult res = fool_impl(sys, t, h, eps, fam, opts);
    res.support_bound = fool_support_bound(sys, eps, fam);
    res.certified = res.err_bound <= eps;
    return res;
}

}  // namespace derand::automata
