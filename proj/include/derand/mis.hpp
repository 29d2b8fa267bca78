#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "derand/bilinear.hpp"
#include "derand/rational.hpp"

namespace derand {

struct Graph {
    uint32_t n = 0;
    std::vector<std::pair<uint32_t, uint32_t>> edges;  // stored with u < v
    std::vector<std::vector<uint32_t>> adj;

    static Graph from_edges(uint32_t n, std::vector<std::pair<uint32_t, uint32_t>> edges);
    // "n m" header then m lines "u v", 0-indexed.
    static Graph parse(std::istream& in);

    uint32_t degree(uint32_t v) const { return static_cast<uint32_t>(adj[v].size()); }
};

// Per-round quantities. Vertices are ranked by ascending degree (ties by id);
// all pair comparisons in the estimator are in rank order.
struct RoundData {
    std::vector<uint32_t> rank;    // rank[v]
    std::vector<Rat> attenuation;  // a_v = min(1, 1 / sum_{w in N(v)} 1/d(w))
    std::vector<Rat> p;            // marking probability, a multiple of 2^-bits
    std::vector<uint64_t> k;       // p * 2^bits
    int bits = 0;
    Rat c;
};

// p_v rounds min(1, c / d(v)) down to a multiple of 2^-bits with
// bits = ceil(log2 n) + 2 + extra_bits. Requires a graph with no isolated
// vertices.
RoundData make_round_data(const Graph& g, const Rat& c, int extra_bits);

// S(X) = sum_v d(v) a_v (sum_{w in N(v)} X_w
//                        - a_v sum_{w < w' in N(v)} X_w X_w'
//                        - sum_{w in N(v), u in N(w), u > w} X_w X_u),
// a lower bound on twice the number of edges wiped out by keeping the marked
// vertices that beat all their marked neighbors in rank.
Rat estimator_S(const Graph& g, const RoundData& rd, const std::vector<uint8_t>& marks);

// The same sums with X_w -> q_w and X_w X_u -> q_w q_u.
Rat expected_S(const Graph& g, const RoundData& rd, const std::vector<Rat>& q);

// Bilinear regrouping of expected_S for the engine: one linear group, one
// square group per vertex, one group per edge, one neighborhood-pair group
// per vertex. All juntas touch a single vertex.
std::vector<Group> estimator_groups(const Graph& g, const RoundData& rd, const QTables& q);

struct RoundResult {
    std::vector<uint8_t> marks;
    std::vector<uint8_t> in_set;  // marked and no higher-ranked marked neighbor
    Rat expectation;              // expected_S at the marking probabilities
    Rat value;                    // estimator at the chosen marks
    std::vector<Rat> trace;
};

RoundResult find_is_round(const Graph& g, const RoundData& rd, const EngineOptions& opts = {});

// Edges with an endpoint in the closed neighborhood of the given set.
uint64_t h_count(const Graph& g, const std::vector<uint8_t>& in_set);

struct MisOptions {
    Rat c = Rat(1, 4);
    int max_retries = 6;  // each retry halves c and adds a probability bit
    EngineOptions engine;
};

struct MisRoundStat {
    Rat expectation;
    Rat value;
    uint64_t removed_edges = 0;
    std::vector<Rat> trace;
};

struct MisResult {
    std::vector<uint32_t> vertices;  // the independent set, ascending
    uint32_t rounds = 0;
    std::vector<MisRoundStat> stats;
};

// Repeats derandomized rounds on the residual graph until no edges remain;
// isolated vertices join the set as they appear.
MisResult maximal_independent_set(const Graph& g, const MisOptions& opts = {});

}  // namespace derand
