#include "derand/bilinear.hpp"

#include <map>
#include <stdexcept>

#include "derand/codes.hpp"

namespace derand {

Junta constant_junta(Rat c) {
    Junta j;
    j.table.push_back(std::move(c));
    return j;
}

std::vector<Rat> wht(std::vector<Rat> table) {
    size_t n = table.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("table size must be a power of two");
    for (size_t half = 1; half < n; half <<= 1)
        for (size_t base = 0; base < n; base += half << 1)
            for (size_t i = base; i < base + half; ++i) {
                Rat a = table[i] + table[i + half];
                Rat b = table[i] - table[i + half];
                table[i] = std::move(a);
                table[i + half] = std::move(b);
            }
    Rat scale(1, static_cast<unsigned long>(n));
    for (Rat& v : table) v *= scale;
    return table;
}

namespace {

void expand_side(const std::vector<Junta>& side, int window, std::vector<WeightedFamily>& out) {
    out.emplace_back();
    WeightedFamily& fam = out.back();
    for (const Junta& j : side) {
        size_t k = j.vars.size() * static_cast<size_t>(window);
        if (j.table.size() != (size_t{1} << k)) throw std::invalid_argument("junta table size mismatch");
        for (size_t a = 0; a + 1 < j.vars.size(); ++a)
            for (size_t b = a + 1; b < j.vars.size(); ++b)
                if (j.vars[a] == j.vars[b]) throw std::invalid_argument("junta variables must be distinct");
        std::vector<Rat> coeff = wht(j.table);
        for (size_t mask = 0; mask < coeff.size(); ++mask) {
            if (coeff[mask] == 0) continue;
            std::vector<uint32_t> ids;
            for (size_t p = 0; p < k; ++p)
                if (mask >> p & 1)
                    ids.push_back(j.vars[p / window] * static_cast<uint32_t>(window) +
                                  static_cast<uint32_t>(p % window));
            fam.entries.emplace_back(std::move(ids), coeff[mask]);
        }
    }
    fam.canonicalize();
}

}  // namespace

Ensemble group_to_ensemble(const Group& g, int window) {
    std::vector<WeightedFamily> sides;
    sides.reserve(2);
    expand_side(g.left, window, sides);
    expand_side(g.right, window, sides);
    Ensemble e;
    e.side1 = std::move(sides[0]);
    e.side2 = std::move(sides[1]);
    return e;
}

EngineResult maximize_stages(uint32_t nvars, int bits, const StageBuilder& build,
                             const EngineOptions& opts) {
    if (nvars == 0 || bits <= 0) throw std::invalid_argument("need variables and bits");
    if (opts.window <= 0 || opts.width <= 0) throw std::invalid_argument("bad engine options");

    EngineResult res;
    res.x.assign(nvars, 0);
    std::map<int, codes::BinaryCode> code_cache;

    int fixed = 0;
    bool have_value = false;
    Rat value;
    while (fixed < bits) {
        int sw = std::min(opts.window, bits - fixed);
        std::vector<Group> groups = build(fixed, res.x);
        std::vector<Ensemble> ens;
        ens.reserve(groups.size());
        for (const Group& g : groups) {
            for (const Junta& j : g.left)
                if (static_cast<int>(j.vars.size()) > opts.width)
                    throw std::invalid_argument("junta wider than engine width");
            for (const Junta& j : g.right)
                if (static_cast<int>(j.vars.size()) > opts.width)
                    throw std::invalid_argument("junta wider than engine width");
            ens.push_back(group_to_ensemble(g, sw));
        }

        Rat sum_t;
        for (const Ensemble& e : ens) sum_t += eval_T(e);
        if (have_value && sum_t != value) throw std::logic_error("stage handoff mismatch");
        if (!have_value) res.expectation = sum_t;

        auto it = code_cache.find(sw);
        if (it == code_cache.end())
            it = code_cache.emplace(sw, codes::vandermonde_code(nvars, static_cast<uint32_t>(sw),
                                                                static_cast<uint32_t>(opts.width)))
                     .first;
        SearchResult sr = lattice_search(ens, it->second, opts.search);

        res.stage_starts.push_back(res.trace.size());
        size_t skip = have_value ? 1 : 0;  // first entry repeats the handoff value
        for (size_t i = skip; i < sr.trace.size(); ++i) res.trace.push_back(sr.trace[i]);

        for (uint32_t v = 0; v < nvars; ++v) {
            uint64_t z = 0;
            for (int l = 0; l < sw; ++l)
                if (sr.x[v * static_cast<uint32_t>(sw) + static_cast<uint32_t>(l)]) z |= uint64_t{1} << l;
            res.x[v] = (res.x[v] << sw) | z;
        }
        value = sr.trace.back();
        have_value = true;
        fixed += sw;
    }
    res.value = value;
    return res;
}

BernoulliResult maximize_bernoulli(const std::vector<uint64_t>& k, int bits,
                                   const BernoulliBuilder& build, const EngineOptions& opts) {
    if (bits <= 0 || bits > 62) throw std::invalid_argument("bits out of range");
    uint32_t n = static_cast<uint32_t>(k.size());
    for (uint64_t kv : k)
        if (kv > (uint64_t{1} << bits)) throw std::invalid_argument("threshold exceeds 2^bits");

    StageBuilder stage = [&](int fixed, const std::vector<uint64_t>& prefix) {
        int sw = std::min(opts.window, bits - fixed);
        int free = bits - fixed - sw;
        QTables q(n, std::vector<Rat>(size_t{1} << sw));
        for (uint32_t v = 0; v < n; ++v)
            for (uint64_t z = 0; z < (uint64_t{1} << sw); ++z) {
                uint64_t base = ((prefix[v] << sw) | z) << free;
                uint64_t cap = uint64_t{1} << free;
                uint64_t num = k[v] > base ? std::min(k[v] - base, cap) : 0;
                q[v][z] = dyadic(static_cast<long>(num), static_cast<unsigned>(free));
            }
        return build(q);
    };

    EngineResult er = maximize_stages(n, bits, stage, opts);
    BernoulliResult res;
    res.y = std::move(er.x);
    res.trace = std::move(er.trace);
    res.stage_starts = std::move(er.stage_starts);
    res.expectation = std::move(er.expectation);
    res.value = std::move(er.value);
    res.x.resize(n);
    for (uint32_t v = 0; v < n; ++v) res.x[v] = res.y[v] < k[v] ? 1 : 0;
    return res;
}

}  // namespace derand
