#include "derand/moments.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace derand {

std::vector<SlotPartition> set_partitions(int p) {
    if (p < 0 || p > 12) throw std::invalid_argument("partition size out of range");
    std::vector<SlotPartition> out;
    // restricted growth strings: label[i] <= 1 + max(label[0..i-1])
    std::vector<int> label(p, 0);
    auto emit = [&]() {
        SlotPartition sp;
        int nb = p == 0 ? 0 : *std::max_element(label.begin(), label.end()) + 1;
        sp.blocks.resize(nb);
        for (int i = 0; i < p; ++i) sp.blocks[label[i]].push_back(i);
        sp.mobius = 1;
        for (const auto& b : sp.blocks) {
            for (size_t f = 2; f < b.size(); ++f) sp.mobius *= static_cast<long>(f);
            if (b.size() % 2 == 0) sp.mobius = -sp.mobius;
        }
        out.push_back(std::move(sp));
    };
    if (p == 0) {
        emit();
        return out;
    }
    std::function<void(int, int)> rec = [&](int i, int maxl) {
        if (i == p) {
            emit();
            return;
        }
        for (int l = 0; l <= maxl + 1; ++l) {
            label[i] = l;
            rec(i + 1, std::max(maxl, l));
        }
    };
    rec(0, -1);
    return out;
}

Peo make_table_peo(std::vector<std::vector<std::vector<Rat>>> tables, int bits) {
    size_t want = size_t{1} << bits;
    for (const auto& func : tables)
        for (const auto& t : func)
            if (t.size() != want) throw std::invalid_argument("value table size mismatch");
    return [tables = std::move(tables), bits](uint32_t j, uint32_t i, int s, int fixed,
                                              uint64_t prefix) -> Rat {
        if (fixed < 0 || fixed > bits) throw std::invalid_argument("bad prefix length");
        int f = bits - fixed;
        Rat sum;
        for (uint64_t low = 0; low < (uint64_t{1} << f); ++low) {
            const Rat& v = tables[j][i][(prefix << f) | low];
            Rat p(1);
            for (int e = 0; e < s; ++e) p *= v;
            sum += p;
        }
        Rat den(1);
        den <<= static_cast<unsigned>(f);
        return sum / den;
    };
}

MomentFunctional chebyshev_functional(const Rat& mu, const Rat& tol) {
    return chebyshev_functional_sq(mu, tol * tol);
}

MomentFunctional chebyshev_functional_sq(const Rat& mu, const Rat& tol_sq) {
    if (tol_sq <= 0) throw std::invalid_argument("tolerance must be positive");
    MomentFunctional f;
    f.terms.push_back({{1, 1}, 1 / tol_sq});
    f.terms.push_back({{2}, 1 / tol_sq});
    f.terms.push_back({{1}, -2 * mu / tol_sq});
    f.terms.push_back({{}, mu * mu / tol_sq});
    return f;
}

namespace {

void validate(const MomentSystem& sys) {
    if (sys.n == 0 || sys.bits <= 0 || sys.bits > 62) throw std::invalid_argument("bad system shape");
    for (const auto& f : sys.functionals)
        for (const auto& t : f.terms) {
            if (t.pattern.size() > 4) throw std::invalid_argument("pattern wider than four slots");
            for (int s : t.pattern)
                if (s < 1) throw std::invalid_argument("pattern exponents must be positive");
        }
}

}  // namespace

Rat eval_system(const MomentSystem& sys, const Peo& peo, const std::vector<uint64_t>& x) {
    validate(sys);
    Rat total;
    for (uint32_t j = 0; j < sys.functionals.size(); ++j)
        for (const PatternTerm& term : sys.functionals[j].terms)
            for (const SlotPartition& sp : set_partitions(static_cast<int>(term.pattern.size()))) {
                Rat prod = term.coeff * sp.mobius;
                for (const auto& block : sp.blocks) {
                    Rat m;
                    for (uint32_t i = 0; i < sys.n; ++i) {
                        Rat p(1);
                        for (int u : block) p *= peo(j, i, term.pattern[u], sys.bits, x[i]);
                        m += p;
                    }
                    prod *= m;
                }
                total += prod;
            }
    return total;
}

MomentResult minimize_system(const MomentSystem& sys, const Peo& peo, const EngineOptions& opts) {
    validate(sys);
    size_t max_slots = 0;
    for (const auto& f : sys.functionals)
        for (const auto& t : f.terms) max_slots = std::max(max_slots, t.pattern.size());

    StageBuilder build = [&](int fixed, const std::vector<uint64_t>& prefix) {
        int sw = std::min(opts.window, sys.bits - fixed);
        uint64_t zn = uint64_t{1} << sw;

        // conditional moments for every (functional, exponent) in play
        std::map<std::pair<uint32_t, int>, std::vector<std::vector<Rat>>> cm;
        for (uint32_t j = 0; j < sys.functionals.size(); ++j)
            for (const PatternTerm& term : sys.functionals[j].terms)
                for (int s : term.pattern) {
                    auto key = std::make_pair(j, s);
                    if (cm.count(key)) continue;
                    auto& tab = cm[key];
                    tab.assign(sys.n, std::vector<Rat>(zn));
                    for (uint32_t i = 0; i < sys.n; ++i)
                        for (uint64_t z = 0; z < zn; ++z)
                            tab[i][z] = peo(j, i, s, fixed + sw, (prefix[i] << sw) | z);
                }

        // junta over one index: product of the block's conditional moments
        auto block_table = [&](uint32_t j, const Pattern& pat, const std::vector<int>& block,
                               uint32_t i) {
            std::vector<Rat> t(zn, Rat(1));
            for (int u : block) {
                const auto& m = cm.at({j, pat[u]})[i];
                for (uint64_t z = 0; z < zn; ++z) t[z] *= m[z];
            }
            return t;
        };

        std::vector<Group> gs;
        Group linear;  // everything with a constant right side
        linear.right.push_back(constant_junta(Rat(1)));
        Rat constant;

        for (uint32_t j = 0; j < sys.functionals.size(); ++j)
            for (const PatternTerm& term : sys.functionals[j].terms) {
                Rat base = -term.coeff;  // minimize by maximizing -S
                for (const SlotPartition& sp :
                     set_partitions(static_cast<int>(term.pattern.size()))) {
                    size_t k = sp.blocks.size();
                    Rat scale = base * sp.mobius;
                    if (k == 0) {
                        constant += scale;
                        continue;
                    }
                    size_t kl = (k + 1) / 2;

                    auto side_juntas = [&](size_t from, size_t upto, const Rat& coeff) {
                        // all index tuples over blocks [from, upto); repeated
                        // indices multiply into a single variable's table
                        std::vector<Junta> out;
                        size_t nb = upto - from;
                        std::vector<uint32_t> tuple(nb, 0);
                        for (;;) {
                            std::map<uint32_t, std::vector<Rat>> per_var;
                            for (size_t b = 0; b < nb; ++b) {
                                auto t = block_table(j, term.pattern, sp.blocks[from + b], tuple[b]);
                                auto it = per_var.find(tuple[b]);
                                if (it == per_var.end()) {
                                    per_var.emplace(tuple[b], std::move(t));
                                } else {
                                    for (uint64_t z = 0; z < zn; ++z) it->second[z] *= t[z];
                                }
                            }
                            Junta jt;
                            for (auto& [var, tab] : per_var) jt.vars.push_back(var);
                            size_t nv = jt.vars.size();
                            jt.table.assign(size_t{1} << (nv * sw), Rat(1));
                            for (size_t idx = 0; idx < jt.table.size(); ++idx) {
                                for (size_t a = 0; a < nv; ++a)
                                    jt.table[idx] *=
                                        per_var.at(jt.vars[a])[(idx >> (a * sw)) & (zn - 1)];
                                jt.table[idx] *= coeff;
                            }
                            out.push_back(std::move(jt));

                            size_t b = 0;
                            while (b < nb && ++tuple[b] == sys.n) tuple[b++] = 0;
                            if (b == nb) break;
                        }
                        return out;
                    };

                    if (k == 1) {
                        for (Junta& jt : side_juntas(0, 1, scale)) linear.left.push_back(std::move(jt));
                    } else {
                        Group g;
                        g.left = side_juntas(0, kl, scale);
                        g.right = side_juntas(kl, k, Rat(1));
                        gs.push_back(std::move(g));
                    }
                }
            }
        linear.left.push_back(constant_junta(constant));
        gs.push_back(std::move(linear));
        return gs;
    };

    EngineOptions eo = opts;
    eo.width = std::max(1, static_cast<int>((max_slots + 1) / 2));
    EngineResult er = maximize_stages(sys.n, sys.bits, build, eo);

    MomentResult res;
    res.x = std::move(er.x);
    res.expectation = -er.expectation;
    res.value = -er.value;
    res.stage_starts = std::move(er.stage_starts);
    res.trace.reserve(er.trace.size());
    for (const Rat& v : er.trace) res.trace.push_back(-v);

    if (eval_system(sys, peo, res.x) != res.value)
        throw std::logic_error("point evaluation disagrees with the search value");
    return res;
}

}  // namespace derand
