#include "derand/mis.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <set>
#include <stdexcept>

namespace derand {

Graph Graph::from_edges(uint32_t n, std::vector<std::pair<uint32_t, uint32_t>> edges) {
    Graph g;
    g.n = n;
    g.adj.resize(n);
    std::set<std::pair<uint32_t, uint32_t>> seen;
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self loop");
        if (u > v) std::swap(u, v);
        if (!seen.insert({u, v}).second) throw std::invalid_argument("duplicate edge");
        g.edges.push_back({u, v});
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
    }
    for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

Graph Graph::parse(std::istream& in) {
    uint32_t n = 0;
    size_t m = 0;
    if (!(in >> n >> m)) throw std::invalid_argument("bad graph header");
    std::vector<std::pair<uint32_t, uint32_t>> edges(m);
    for (auto& [u, v] : edges)
        if (!(in >> u >> v)) throw std::invalid_argument("truncated edge list");
    return from_edges(n, std::move(edges));
}

RoundData make_round_data(const Graph& g, const Rat& c, int extra_bits) {
    uint32_t n = g.n;
    RoundData rd;
    rd.c = c;
    rd.bits = ceil_log2(n) + 2 + extra_bits;
    if (rd.bits > 40) throw std::invalid_argument("probability grid too fine");

    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return std::make_pair(g.degree(a), a) < std::make_pair(g.degree(b), b);
    });
    rd.rank.resize(n);
    for (uint32_t i = 0; i < n; ++i) rd.rank[order[i]] = i;

    rd.attenuation.resize(n);
    rd.p.resize(n);
    rd.k.resize(n);
    for (uint32_t v = 0; v < n; ++v) {
        if (g.degree(v) == 0) throw std::invalid_argument("isolated vertex in round data");
        Rat growth;
        for (uint32_t w : g.adj[v]) growth += Rat(1, g.degree(w));
        rd.attenuation[v] = growth > 1 ? 1 / growth : Rat(1);
        Rat target = c / g.degree(v);
        rd.p[v] = dyadic_floor(target > 1 ? Rat(1) : target, static_cast<unsigned>(rd.bits));
        Rat scaled = rd.p[v];
        scaled <<= static_cast<unsigned>(rd.bits);
        rd.k[v] = scaled.get_num().get_ui();
    }
    return rd;
}

namespace {

// The three per-vertex sums shared by the estimator and its expectation:
// T1 = sum X_w, T2 = sum over neighbor pairs, T3 = sum over edges leaving a
// neighbor toward higher rank. The two callers differ only in the value of a
// single variable or a product of two.
template <typename Mul>
Rat sum_terms(const Graph& g, const RoundData& rd, const Mul& value) {
    Rat total;
    for (uint32_t v = 0; v < g.n; ++v) {
        if (g.degree(v) == 0) continue;
        Rat t1, t2, t3;
        const auto& nb = g.adj[v];
        for (uint32_t w : nb) t1 += value(w, w);
        for (size_t i = 0; i < nb.size(); ++i)
            for (size_t j = i + 1; j < nb.size(); ++j) t2 += value(nb[i], nb[j]);
        for (uint32_t w : nb)
            for (uint32_t u : g.adj[w])
                if (rd.rank[u] > rd.rank[w]) t3 += value(w, u);
        const Rat& a = rd.attenuation[v];
        total += Rat(g.degree(v)) * a * (t1 - a * t2 - t3);
    }
    return total;
}

}  // namespace

Rat estimator_S(const Graph& g, const RoundData& rd, const std::vector<uint8_t>& marks) {
    return sum_terms(g, rd, [&](uint32_t w, uint32_t u) {
        return Rat(w == u ? marks[w] : marks[w] * marks[u]);
    });
}

Rat expected_S(const Graph& g, const RoundData& rd, const std::vector<Rat>& q) {
    return sum_terms(g, rd, [&](uint32_t w, uint32_t u) { return w == u ? q[w] : q[w] * q[u]; });
}

std::vector<Group> estimator_groups(const Graph& g, const RoundData& rd, const QTables& q) {
    uint32_t n = g.n;
    std::vector<Rat> gamma(n), gamma2(n);
    for (uint32_t w = 0; w < n; ++w)
        for (uint32_t v : g.adj[w]) {
            Rat da = Rat(g.degree(v)) * rd.attenuation[v];
            gamma[w] += da;
            gamma2[w] += da * rd.attenuation[v] / 2;
        }

    auto scaled = [&](uint32_t w, const Rat& s) {
        Junta j;
        j.vars = {w};
        j.table = q[w];
        for (Rat& v : j.table) v *= s;
        return j;
    };

    std::vector<Group> gs;
    Group linear;
    for (uint32_t w = 0; w < n; ++w) linear.left.push_back(scaled(w, gamma[w]));
    linear.right.push_back(constant_junta(Rat(1)));
    gs.push_back(std::move(linear));

    for (uint32_t w = 0; w < n; ++w) {
        Group sq;
        sq.left.push_back(scaled(w, gamma2[w]));
        sq.right.push_back({{w}, q[w]});
        gs.push_back(std::move(sq));
    }

    for (auto [u, v] : g.edges) {
        uint32_t low = rd.rank[u] < rd.rank[v] ? u : v;
        uint32_t high = low == u ? v : u;
        Group e;
        e.left.push_back(scaled(low, -gamma[low]));
        e.right.push_back({{high}, q[high]});
        gs.push_back(std::move(e));
    }

    for (uint32_t v = 0; v < n; ++v) {
        if (g.degree(v) == 0) continue;
        Rat coeff = -Rat(g.degree(v)) * rd.attenuation[v] * rd.attenuation[v] / 2;
        Group pair;
        for (uint32_t w : g.adj[v]) {
            pair.left.push_back(scaled(w, coeff));
            pair.right.push_back({{w}, q[w]});
        }
        gs.push_back(std::move(pair));
    }
    return gs;
}

RoundResult find_is_round(const Graph& g, const RoundData& rd, const EngineOptions& opts) {
    EngineOptions eo = opts;
    eo.width = 1;
    BernoulliResult br = maximize_bernoulli(
        rd.k, rd.bits, [&](const QTables& q) { return estimator_groups(g, rd, q); }, eo);

    RoundResult res;
    res.marks = std::move(br.x);
    res.expectation = std::move(br.expectation);
    res.value = std::move(br.value);
    res.trace = std::move(br.trace);
    res.in_set.assign(g.n, 0);
    for (uint32_t w = 0; w < g.n; ++w) {
        if (!res.marks[w]) continue;
        bool beaten = false;
        for (uint32_t u : g.adj[w])
            if (res.marks[u] && rd.rank[u] > rd.rank[w]) {
                beaten = true;
                break;
            }
        res.in_set[w] = beaten ? 0 : 1;
    }
    return res;
}

uint64_t h_count(const Graph& g, const std::vector<uint8_t>& in_set) {
    std::vector<uint8_t> hit(g.n, 0);
    for (uint32_t v = 0; v < g.n; ++v)
        if (in_set[v]) {
            hit[v] = 1;
            for (uint32_t u : g.adj[v]) hit[u] = 1;
        }
    uint64_t cnt = 0;
    for (auto [u, v] : g.edges)
        if (hit[u] || hit[v]) ++cnt;
    return cnt;
}

MisResult maximal_independent_set(const Graph& g, const MisOptions& opts) {
    MisResult res;
    std::vector<uint8_t> alive(g.n, 1);

    for (;;) {
        std::vector<uint32_t> ids;
        for (uint32_t v = 0; v < g.n; ++v) {
            if (!alive[v]) continue;
            bool isolated = true;
            for (uint32_t u : g.adj[v])
                if (alive[u]) {
                    isolated = false;
                    break;
                }
            if (isolated) {
                res.vertices.push_back(v);
                alive[v] = 0;
            } else {
                ids.push_back(v);
            }
        }
        if (ids.empty()) break;

        std::vector<uint32_t> local(g.n, 0);
        for (uint32_t i = 0; i < ids.size(); ++i) local[ids[i]] = i;
        std::vector<std::pair<uint32_t, uint32_t>> sub_edges;
        for (auto [u, v] : g.edges)
            if (alive[u] && alive[v]) sub_edges.push_back({local[u], local[v]});
        Graph sub = Graph::from_edges(static_cast<uint32_t>(ids.size()), std::move(sub_edges));

        Rat c = opts.c;
        int extra = 0;
        RoundData rd;
        for (;;) {
            rd = make_round_data(sub, c, extra);
            if (expected_S(sub, rd, rd.p) > 0) break;
            if (extra >= opts.max_retries)
                throw std::runtime_error("marking probabilities kept a nonpositive expectation");
            c /= 2;
            ++extra;
        }

        RoundResult round = find_is_round(sub, rd, opts.engine);
        MisRoundStat stat;
        stat.expectation = round.expectation;
        stat.value = round.value;
        stat.removed_edges = h_count(sub, round.in_set);
        stat.trace = round.trace;
        res.stats.push_back(std::move(stat));
        ++res.rounds;

        bool progressed = false;
        for (uint32_t w = 0; w < sub.n; ++w)
            if (round.in_set[w]) {
                progressed = true;
                res.vertices.push_back(ids[w]);
                alive[ids[w]] = 0;
                for (uint32_t u : sub.adj[w]) alive[ids[u]] = 0;
            }
        if (!progressed) throw std::logic_error("round made no progress");
    }

    std::sort(res.vertices.begin(), res.vertices.end());
    return res;
}

}  // namespace derand
