#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "derand/apps.hpp"
#include "derand/automata.hpp"
#include "derand/bilinear.hpp"
#include "derand/codes.hpp"
#include "derand/ensembles.hpp"
#include "derand/fooling.hpp"
#include "derand/gbgame.hpp"
#include "derand/mis.hpp"
#include "derand/moments.hpp"
#include "derand/oracles.hpp"
#include "derand/rational.hpp"

using nlohmann::ordered_json;
using namespace derand;

namespace {

// exit codes: 0 ok, 2 bad input, 3 certification failure, 1 internal error
constexpr int exit_ok = 0;
constexpr int exit_parse = 2;
constexpr int exit_uncertified = 3;

uint64_t fnv1a(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Rat parse_cli_rat(const std::string& s) {
    Rat r = parse_decimal_or_rat(s);
    return r;
}

ordered_json bound_entry(const std::string& name, const Rat& value, const char* provenance) {
    ordered_json b;
    b["name"] = name;
    b["value"] = rat_str(value);
    b["float"] = value.get_d();
    b["provenance"] = provenance;
    return b;
}

struct Outcome {
    ordered_json doc;
    std::vector<std::string> human;
    int code = exit_ok;
};

std::string fmt_rat(const Rat& v) {
    std::ostringstream out;
    out << rat_str(v) << " (" << v.get_d() << ")";
    return out.str();
}

// ---- instance file parsing beyond the library parsers

std::vector<std::vector<int>> parse_entry_matrix(const std::string& text) {
    std::istringstream in(text);
    long m = 0, n = 0;
    if (!(in >> m >> n) || m < 1 || n < 1 || m > 4096 || n > 4096)
        throw std::invalid_argument("expected an 'm n' header");
    std::vector<std::vector<int>> mat(static_cast<size_t>(m), std::vector<int>(static_cast<size_t>(n)));
    for (auto& row : mat)
        for (int& a : row)
            if (!(in >> a)) throw std::invalid_argument("matrix entries truncated");
    std::string extra;
    if (in >> extra) throw std::invalid_argument("trailing tokens after the matrix");
    return mat;
}

std::vector<std::vector<Rat>> parse_vectors(const std::string& text) {
    std::istringstream in(text);
    long n = 0, d = 0;
    if (!(in >> n >> d) || n < 1 || d < 1 || n > 4096 || d > 4096)
        throw std::invalid_argument("expected an 'n d' header");
    std::vector<std::vector<Rat>> vs(static_cast<size_t>(n));
    for (auto& v : vs)
        for (long j = 0; j < d; ++j) {
            std::string tok;
            if (!(in >> tok)) throw std::invalid_argument("vector entries truncated");
            v.push_back(parse_decimal_or_rat(tok));
        }
    std::string extra;
    if (in >> extra) throw std::invalid_argument("trailing tokens after the vectors");
    return vs;
}

automata::CounterSpec parse_counter_spec(const std::string& text) {
    std::istringstream in(text);
    long m = 0, eta = 0, T = 0;
    if (!(in >> m >> eta >> T) || m < 1 || eta < 1 || T < 1 || m > 256 || eta > (1 << 20) ||
        T > (1 << 20))
        throw std::invalid_argument("expected an 'm eta T' header");
    automata::CounterSpec spec;
    spec.m = static_cast<uint32_t>(m);
    spec.eta = static_cast<uint32_t>(eta);
    spec.T = static_cast<int>(T);
    spec.inc.assign(static_cast<size_t>(m),
                    std::vector<std::array<long, 2>>(static_cast<size_t>(T), {0, 0}));
    for (auto& row : spec.inc)
        for (auto& cell : row)
            if (!(in >> cell[0] >> cell[1]))
                throw std::invalid_argument("increment entries truncated");
    std::string extra;
    if (in >> extra) throw std::invalid_argument("trailing tokens after the increments");
    return spec;
}

// ---- subcommands

Outcome cmd_mis(const std::string& path, const std::string& c_str, int threads) {
    std::string text = read_file(path);
    std::istringstream in(text);
    Graph g = Graph::parse(in);

    MisOptions mo;
    mo.c = parse_cli_rat(c_str);
    mo.engine.search.threads = threads;
    MisResult res = maximal_independent_set(g, mo);

    std::vector<uint8_t> in_set(g.n, 0);
    for (uint32_t v : res.vertices) in_set[v] = 1;
    bool independent = true;
    for (auto [u, v] : g.edges)
        if (in_set[u] && in_set[v]) independent = false;
    bool maximal = true;
    for (uint32_t v = 0; v < g.n; ++v) {
        if (in_set[v]) continue;
        bool blocked = false;
        for (uint32_t w : g.adj[v]) blocked = blocked || in_set[w];
        if (!blocked) maximal = false;
    }

    long round_cap = static_cast<long>(std::floor(
        20.0L * (1.0L + std::log2(static_cast<long double>(g.edges.size() + 1)))));
    Rat margin_min;
    bool have_margin = false;
    for (const auto& st : res.stats) {
        Rat margin = st.value - st.expectation;
        if (!have_margin || margin < margin_min) margin_min = margin;
        have_margin = true;
    }

    Outcome out;
    out.doc["command"] = "mis";
    out.doc["input_digest"] = hex64(fnv1a(text));
    out.doc["n"] = g.n;
    out.doc["m"] = g.edges.size();
    out.doc["c"] = rat_str(mo.c);
    out.doc["set"] = res.vertices;
    out.doc["size"] = res.vertices.size();
    out.doc["rounds"] = res.rounds;
    ordered_json rounds = ordered_json::array();
    for (const auto& st : res.stats) {
        ordered_json r;
        r["expectation"] = rat_str(st.expectation);
        r["value"] = rat_str(st.value);
        r["removed_edges"] = st.removed_edges;
        rounds.push_back(std::move(r));
    }
    out.doc["round_detail"] = std::move(rounds);
    ordered_json bounds = ordered_json::array();
    if (have_margin)
        bounds.push_back(bound_entry("round-estimator-margin-min", margin_min, "engine-guarantee"));
    bounds.push_back(bound_entry("round-cap", Rat(round_cap), "headline"));
    out.doc["bounds"] = std::move(bounds);
    out.doc["independent"] = independent;
    out.doc["maximal"] = maximal;
    if (!independent || !maximal) throw std::logic_error("returned set failed the direct check");

    out.human.push_back("independent set of " + std::to_string(res.vertices.size()) + " vertices in " +
                        std::to_string(res.rounds) + " rounds (cap " + std::to_string(round_cap) +
                        ")");
    if (have_margin)
        out.human.push_back("min estimator margin: " + fmt_rat(margin_min));
    out.human.push_back("checks: independent, maximal");
    return out;
}

Outcome cmd_gb(const std::string& path, bool use_automata, int threads) {
    std::string text = read_file(path);
    std::istringstream in(text);
    SignMatrix sm = SignMatrix::parse(in);

    Outcome out;
    out.doc["command"] = "gb";
    out.doc["input_digest"] = hex64(fnv1a(text));
    out.doc["n"] = sm.n;
    out.doc["mode"] = use_automata ? "automata" : "engine";

    if (!use_automata) {
        EngineOptions eo;
        eo.search.threads = threads;
        GbResult res = gb_solve(sm, eo);
        Rat value_sq = Rat(res.value) * Rat(res.value);
        Rat headline_sq(static_cast<unsigned long>(sm.n));
        headline_sq = headline_sq * headline_sq * headline_sq / 3;
        out.doc["value"] = res.value.get_str();
        out.doc["x"] = res.x;
        out.doc["y"] = res.y;
        out.doc["sprime"] = rat_str(res.sprime);
        out.doc["expectation_sprime"] = rat_str(res.expectation);
        ordered_json bounds = ordered_json::array();
        bounds.push_back(bound_entry("value-sq-certified", res.certified_sq, "oracle"));
        bounds.push_back(bound_entry("value-sq-headline", headline_sq, "headline"));
        out.doc["bounds"] = std::move(bounds);
        if (value_sq < res.certified_sq) throw std::logic_error("value fell below the certified bound");
        out.human.push_back("value " + res.value.get_str() + ", certified value^2 >= " +
                            fmt_rat(res.certified_sq));
        out.human.push_back("headline value^2 >= " + fmt_rat(headline_sq));
    } else {
        apps::GbAutomataOptions go;
        go.reduce.threads = threads;
        apps::GbAutomataResult res = apps::gb_automata(sm.a, go);
        out.doc["eps"] = rat_str(res.eps);
        out.doc["value"] = res.value;
        out.doc["x"] = res.x;
        out.doc["y"] = res.y;
        out.doc["support"] = res.support;
        out.doc["fool_err_bound"] = rat_str(res.fool_err_bound);
        ordered_json bounds = ordered_json::array();
        bounds.push_back(bound_entry("expected-uniform", res.expected_uniform, "oracle"));
        bounds.push_back(bound_entry("value-measured", res.bound_measured, "engine-guarantee"));
        bounds.push_back(bound_entry("value-apriori", res.bound_apriori, "engine-guarantee"));
        out.doc["bounds"] = std::move(bounds);
        if (Rat(res.value) < res.bound_measured || Rat(res.value) < res.bound_apriori)
            throw std::logic_error("value fell below a certified bound");
        out.human.push_back("value " + std::to_string(res.value) + " over " +
                            std::to_string(res.support) + " fooled strings (eps " + rat_str(res.eps) +
                            ")");
        out.human.push_back("bounds: measured " + fmt_rat(res.bound_measured) + ", apriori " +
                            fmt_rat(res.bound_apriori));
    }
    return out;
}

Outcome cmd_setdisc(const std::string& path, const std::string& eps_str, int threads) {
    std::string text = read_file(path);
    auto mat = parse_entry_matrix(text);

    apps::SetDiscOptions so;
    if (!eps_str.empty()) so.eps = parse_cli_rat(eps_str);
    so.reduce.threads = threads;

    Outcome out;
    out.doc["command"] = "setdisc";
    out.doc["input_digest"] = hex64(fnv1a(text));
    out.doc["m"] = mat.size();
    out.doc["n"] = mat[0].size();
    try {
        apps::SetDiscResult res = apps::set_discrepancy(mat, so);
        out.doc["eps"] = rat_str(res.eps);
        out.doc["signs"] = res.signs;
        out.doc["sums"] = res.sums;
        out.doc["max_abs"] = res.max_abs;
        out.doc["guaranteed"] = res.guaranteed;
        out.doc["support"] = res.support;
        out.doc["fool_err_bound"] = rat_str(res.fool_err_bound);
        ordered_json bounds = ordered_json::array();
        bounds.push_back(bound_entry("lambda-sq", Rat(res.lambda_sq), "headline"));
        bounds.push_back(bound_entry("p-uniform", res.p_uniform, "oracle"));
        bounds.push_back(bound_entry("exists-bound", res.exists_bound, "engine-guarantee"));
        out.doc["bounds"] = std::move(bounds);
        out.human.push_back("max |row sum| " + std::to_string(res.max_abs) + ", threshold sqrt(" +
                            std::to_string(res.lambda_sq) + ")");
        out.human.push_back("existence bound " + fmt_rat(res.exists_bound) +
                            (res.guaranteed ? " < 1 (guaranteed)" : " (not guaranteed a priori)"));
        out.human.push_back("support " + std::to_string(res.support) + ", eps " + rat_str(res.eps));
    } catch (const std::runtime_error& e) {
        out.doc["error"] = e.what();
        out.human.push_back(std::string("FAILED: ") + e.what());
        out.code = exit_uncertified;
    }
    return out;
}

Outcome cmd_fool(const std::string& path, int window, const std::string& eps_str,
                 const std::string& family, int threads) {
    std::string text = read_file(path);
    auto spec = parse_counter_spec(text);
    auto sys = automata::make_counter_system(spec);
    Rat eps = parse_cli_rat(eps_str);
    auto fam = family == "full" ? automata::canonical_full(sys) : automata::canonical_counter(sys);

    automata::ReduceOptions ro;
    ro.threads = threads;
    auto fr = automata::fool(sys, 0, window, eps, fam, ro);
    Rat err_uni = automata::err_uniform(sys, fr.dist);

    Outcome out;
    out.doc["command"] = "fool";
    out.doc["input_digest"] = hex64(fnv1a(text));
    out.doc["m"] = sys.m;
    out.doc["eta"] = sys.eta;
    out.doc["T"] = sys.T;
    out.doc["window"] = window;
    out.doc["family"] = family;
    out.doc["eps"] = rat_str(eps);
    out.doc["support"] = fr.dist.strings.size();
    out.doc["certified"] = fr.certified;
    ordered_json bounds = ordered_json::array();
    bounds.push_back(bound_entry("support-bound", Rat(static_cast<unsigned long>(fr.support_bound)),
                                 "headline"));
    bounds.push_back(bound_entry("err-bound", fr.err_bound, "engine-guarantee"));
    bounds.push_back(bound_entry("err-uniform", err_uni, "oracle"));
    out.doc["bounds"] = std::move(bounds);
    ordered_json merges = ordered_json::array();
    for (const auto& node : fr.nodes) {
        ordered_json nj;
        nj["t"] = node.t;
        nj["h"] = node.h;
        nj["product_fallback"] = node.report.product_fallback;
        nj["e_used"] = node.report.e_used;
        nj["eps"] = rat_str(node.report.eps);
        nj["err_measured"] = rat_str(node.report.err_measured);
        merges.push_back(std::move(nj));
    }
    out.doc["merges"] = std::move(merges);
    if (fr.dist.strings.size() <= 1024) {
        ordered_json strings = ordered_json::array();
        for (size_t v = 0; v < fr.dist.strings.size(); ++v) {
            ordered_json sj;
            sj["bits"] = automata::to_string(fr.dist.strings[v]);
            if (fr.dist.kind == automata::TableKind::counter)
                sj["sums"] = fr.dist.true_offsets[v];
            else {
                std::vector<uint32_t> finals;
                for (uint32_t i = 0; i < sys.m; ++i)
                    finals.push_back(fr.dist.tables[v].map[i][0]);
                sj["finals"] = finals;
            }
            strings.push_back(std::move(sj));
        }
        out.doc["strings"] = std::move(strings);
    } else {
        std::string cat;
        for (const auto& s : fr.dist.strings) cat += automata::to_string(s) + "\n";
        out.doc["strings_digest"] = hex64(fnv1a(cat));
    }
    out.code = fr.certified ? exit_ok : exit_uncertified;
    out.human.push_back("support " + std::to_string(fr.dist.strings.size()) + " (bound " +
                        std::to_string(fr.support_bound) + ")");
    out.human.push_back("err bound " + fmt_rat(fr.err_bound) + ", exact err " + fmt_rat(err_uni) +
                        ", eps " + rat_str(eps));
    out.human.push_back(fr.certified ? "certified" : "NOT certified");
    return out;
}

ordered_json jl_doc(const apps::JlResult& res) {
    ordered_json doc;
    doc["d"] = res.d;
    doc["k"] = res.k;
    doc["delta"] = rat_str(res.delta);
    doc["quant_step"] = rat_str(res.quant_step);
    doc["window_radius"] = res.window_radius;
    doc["stage1_eps"] = rat_str(res.stage1_eps);
    doc["stage2_eps"] = rat_str(res.stage2_eps);
    doc["stage1_err_bound"] = rat_str(res.stage1_err_bound);
    ordered_json merges = ordered_json::array();
    for (const auto& rr : res.stage2) {
        ordered_json nj;
        nj["eps"] = rat_str(rr.eps);
        nj["product_fallback"] = rr.product_fallback;
        nj["capped"] = rr.capped;
        nj["e_used"] = rr.e_used;
        nj["err_measured"] = rat_str(rr.err_measured);
        nj["certified"] = rr.certified;
        merges.push_back(std::move(nj));
    }
    doc["stage2_merges"] = std::move(merges);
    ordered_json errs = ordered_json::array();
    for (const Rat& e : res.err_each) errs.push_back(rat_str(e));
    doc["err_each"] = std::move(errs);
    doc["support"] = res.support;
    doc["certified"] = res.certified;
    ordered_json bounds = ordered_json::array();
    bounds.push_back(bound_entry("target-distortion", 2 * res.delta, "headline"));
    bounds.push_back(bound_entry("worst-distortion", res.worst_distortion, "oracle"));
    Rat err_max;
    for (const Rat& e : res.err_each) err_max = std::max(err_max, e);
    bounds.push_back(bound_entry("err-max", err_max, "engine-guarantee"));
    doc["bounds"] = std::move(bounds);
    ordered_json reports = ordered_json::array();
    for (const auto& rep : res.reports) {
        ordered_json rj;
        rj["norm_sq"] = rat_str(rep.norm_sq);
        rj["distortion"] = rat_str(rep.distortion);
        rj["proxy_sq"] = rat_str(rep.proxy_sq);
        rj["proxy_gap"] = rat_str(rep.proxy_gap);
        rj["pass"] = rep.pass;
        reports.push_back(std::move(rj));
    }
    doc["reports"] = std::move(reports);
    size_t cells = res.matrix.size() * (res.matrix.empty() ? 0 : res.matrix[0].size());
    if (cells <= 4096) {
        doc["matrix"] = res.matrix;
    } else {
        std::string cat;
        for (const auto& row : res.matrix)
            for (int a : row) cat += a > 0 ? '+' : '-';
        doc["matrix_digest"] = hex64(fnv1a(cat));
    }
    return doc;
}

Outcome cmd_jl(const std::string& path, const std::string& delta_str, long k, bool distances,
               int threads) {
    std::string text = read_file(path);
    auto vs = parse_vectors(text);
    Rat delta = parse_cli_rat(delta_str);
    apps::JlOptions jo;
    if (k < 0 || k > (1 << 20)) throw std::invalid_argument("k out of range");
    jo.k = static_cast<uint32_t>(k);
    jo.reduce.threads = threads;

    Outcome out;
    out.doc["command"] = "jl";
    out.doc["input_digest"] = hex64(fnv1a(text));
    out.doc["vectors"] = vs.size();
    out.doc["input_dim"] = vs[0].size();
    out.doc["distances"] = distances;

    const apps::JlResult* jr = nullptr;
    apps::JlResult direct;
    apps::JlDistancesResult dist;
    if (distances) {
        dist = apps::jl_distances(vs, delta, jo);
        out.doc["transform"] = jl_doc(dist.transform);
        ordered_json pairs = ordered_json::array();
        for (const auto& p : dist.pairs) {
            ordered_json pj;
            pj["a"] = p.a;
            pj["b"] = p.b;
            pj["dist_sq"] = rat_str(p.dist_sq);
            pj["mapped_ratio"] = rat_str(p.mapped_ratio);
            pj["distortion"] = rat_str(p.distortion);
            pairs.push_back(std::move(pj));
        }
        out.doc["pairs"] = std::move(pairs);
        jr = &dist.transform;
    } else {
        direct = apps::jl_transform(vs, delta, jo);
        out.doc["transform"] = jl_doc(direct);
        jr = &direct;
    }
    out.code = jr->certified ? exit_ok : exit_uncertified;
    out.human.push_back("k " + std::to_string(jr->k) + ", support " + std::to_string(jr->support) +
                        ", worst distortion " + fmt_rat(jr->worst_distortion) + " (target " +
                        rat_str(2 * jr->delta) + ")");
    out.human.push_back(jr->certified ? "CERTIFIED" : "NOT-CERTIFIED");
    if (distances)
        out.human.push_back(std::to_string(dist.pairs.size()) + " pairs embedded");
    return out;
}

// ---- verify: re-run the certification arguments on built-in instances

struct Lcg {
    uint64_t s;
    uint64_t next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return s >> 33;
    }
};

bool check_engine(int threads) {
    Lcg rng{11};
    auto code = codes::vandermonde_code(6, 2, 1);
    for (int round = 0; round < 20; ++round) {
        std::vector<Ensemble> ens;
        for (int j = 0; j < 3; ++j) {
            Ensemble e;
            for (int side = 0; side < 2; ++side) {
                WeightedFamily& fam = side ? e.side2 : e.side1;
                uint32_t var = static_cast<uint32_t>(rng.next() % 6);
                for (uint32_t mask = 0; mask < 4; ++mask) {
                    std::vector<uint32_t> ids;
                    if (mask & 1) ids.push_back(var * 2);
                    if (mask & 2) ids.push_back(var * 2 + 1);
                    long num = static_cast<long>(rng.next() % 7) - 3;
                    if (num != 0) fam.entries.push_back({ids, Rat(num, 4)});
                }
            }
            e.canonicalize();
            ens.push_back(std::move(e));
        }
        SearchOptions so;
        so.threads = threads;
        auto res = lattice_search(ens, code, so);
        Rat total_t = 0, total_s = 0;
        for (const auto& e : ens) {
            total_t += eval_T(e);
            total_s += eval_S_direct(e, res.x);
        }
        if (res.trace.front() != total_t) return false;
        if (res.trace.back() != total_s) return false;
        if (total_s < total_t) return false;
        for (size_t i = 1; i < res.trace.size(); ++i)
            if (res.trace[i] < res.trace[i - 1]) return false;
    }
    return true;
}

bool check_codes() {
    for (auto [n, t, w] : {std::array<uint32_t, 3>{16, 2, 2}, {64, 2, 2}}) {
        auto code = codes::vandermonde_code(n, t, w);
        for (size_t a = 0; a < code.ground_size(); ++a)
            for (size_t b = a + 1; b < code.ground_size(); ++b)
                if (code.words[a] == code.words[b]) return false;
        std::vector<Ensemble> ens;
        for (uint32_t v = 0; v + 1 < std::min(n, 6u); ++v) {
            Ensemble e;
            e.side1.entries.push_back({{v * t}, Rat(1)});
            e.side1.entries.push_back({{v * t, v * t + 1}, Rat(1, 2)});
            e.side2.entries.push_back({{(v + 1) * t}, Rat(1)});
            e.canonicalize();
            ens.push_back(std::move(e));
        }
        if (!codes::verify_fools(code, ens)) return false;
    }
    return true;
}

bool check_fooling(int threads) {
    using namespace automata;
    // two counters over +-1 increments, a forced merge, exact error audit
    std::vector<std::vector<long>> rows = {{1, -1, 1, 1, -1, 1, 1, -1},
                                           {1, 1, -1, 1, 1, -1, -1, 1}};
    auto sys = apps::row_counter_system(rows, 17);
    auto fam = canonical_counter(sys);
    ReduceOptions ro;
    ro.threads = threads;
    auto fr = fool(sys, 0, 8, Rat(1, 2), fam, ro);
    if (fr.dist.strings.size() > fool_support_bound(sys, Rat(1, 2), fam)) return false;
    if (!fr.certified) return false;
    if (err_uniform(sys, fr.dist) > fr.err_bound) return false;

    ro.support_cap = 8;
    ro.product_cap = 8;
    auto forced = fool(sys, 0, 8, Rat(3, 2), fam, ro);
    bool merged = false;
    for (const auto& node : forced.nodes) merged = merged || !node.report.product_fallback;
    if (!merged) return false;
    if (err_uniform(sys, forced.dist) > forced.err_bound) return false;
    return true;
}

bool check_moments(int threads) {
    Lcg rng{29};
    for (int round = 0; round < 6; ++round) {
        MomentSystem sys;
        sys.n = 4;
        sys.bits = 2;
        std::vector<std::vector<std::vector<Rat>>> tables(1);
        tables[0].resize(sys.n);
        for (auto& table : tables[0])
            for (int v = 0; v < 4; ++v)
                table.push_back(Rat(static_cast<long>(rng.next() % 5) - 2, 2));
        Rat mu(static_cast<long>(rng.next() % 9) - 4, 2);
        sys.functionals.push_back(chebyshev_functional(mu, Rat(3, 2)));
        auto peo = make_table_peo(tables, sys.bits);
        EngineOptions eo;
        eo.search.threads = threads;
        auto res = minimize_system(sys, peo, eo);
        if (res.value > res.expectation) return false;
        for (size_t i = 1; i < res.trace.size(); ++i)
            if (res.trace[i] > res.trace[i - 1]) return false;
        EngineOptions eo1;
        eo1.search.threads = 1;
        auto res1 = minimize_system(sys, peo, eo1);
        if (res1.x != res.x) return false;
    }
    return true;
}

Outcome cmd_verify(const std::string& suite, int threads) {
    Outcome out;
    out.doc["command"] = "verify";
    out.doc["suite"] = suite;
    ordered_json checks = ordered_json::array();
    bool all = true;
    auto run = [&](const char* name, bool (*fn)(int), int arg) {
        bool pass = fn(arg);
        checks.push_back(ordered_json{{"name", name}, {"pass", pass}});
        all = all && pass;
        out.human.push_back(std::string(name) + ": " + (pass ? "pass" : "FAIL"));
    };
    if (suite == "engine" || suite == "all") run("engine", check_engine, threads);
    if (suite == "codes" || suite == "all")
        run("codes", [](int) { return check_codes(); }, 0);
    if (suite == "fooling" || suite == "all") run("fooling", check_fooling, threads);
    if (suite == "moments" || suite == "all") run("moments", check_moments, threads);
    out.doc["checks"] = std::move(checks);
    out.doc["pass"] = all;
    out.code = all ? exit_ok : exit_uncertified;
    out.human.push_back(all ? "all checks passed" : "CHECKS FAILED");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact derandomization toolkit: conditional expectations over code lattices"};
    app.require_subcommand(1);
    bool json_out = false;
    int threads = 1;
    app.add_flag("--json", json_out, "emit the structured result document");
    app.add_option("--threads", threads, "worker threads; results do not depend on the count")
        ->check(CLI::Range(1, 64));

    std::string mis_file, mis_c = "1/4";
    auto* mis_cmd = app.add_subcommand("mis", "maximal independent set from an edge list");
    mis_cmd->fallthrough();
    mis_cmd->add_option("graph", mis_file, "graph file: 'n m' header, then 'u v' per edge")
        ->required();
    mis_cmd->add_option("--c", mis_c, "marking constant as p/q");

    std::string gb_file;
    bool gb_automata_flag = false;
    auto* gb_cmd = app.add_subcommand("gb", "Gale-Berlekamp switching game lower bound");
    gb_cmd->fallthrough();
    gb_cmd->add_option("matrix", gb_file, "sign matrix file: 'n' header, then n^2 entries")
        ->required();
    gb_cmd->add_flag("--automata", gb_automata_flag, "use the fooled-distribution route");

    std::string sd_file, sd_eps;
    auto* sd_cmd = app.add_subcommand("setdisc", "low-discrepancy signs for a set system");
    sd_cmd->fallthrough();
    sd_cmd->add_option("matrix", sd_file, "matrix file: 'm n' header, then m*n entries in {-1,0,1}")
        ->required();
    sd_cmd->add_option("--eps", sd_eps, "merge budget as p/q (default 1/(2m))");

    std::string fool_file, fool_eps, fool_family = "counter";
    int fool_T = 0;
    auto* fool_cmd = app.add_subcommand("fool", "small distribution fooling counter automata");
    fool_cmd->fallthrough();
    fool_cmd
        ->add_option("spec", fool_file,
                     "counter spec file: 'm eta T' header, then per automaton T increment pairs")
        ->required();
    fool_cmd->add_option("--T", fool_T, "window length, a power of two")->required();
    fool_cmd->add_option("--eps", fool_eps, "fooling budget as p/q")->required();
    fool_cmd->add_option("--canonical", fool_family, "test family")
        ->check(CLI::IsMember({"counter", "full"}));

    std::string jl_file, jl_delta;
    long jl_k = 0;
    bool jl_distances_flag = false;
    auto* jl_cmd = app.add_subcommand("jl", "deterministic Johnson-Lindenstrauss embedding");
    jl_cmd->fallthrough();
    jl_cmd->add_option("vectors", jl_file, "vectors file: 'n d' header, then n*d rationals")
        ->required();
    jl_cmd->add_option("--delta", jl_delta, "distortion parameter, a dyadic p/q in (0,1)")
        ->required();
    jl_cmd->add_option("--k", jl_k, "output rows (rounded up to a power of two)");
    jl_cmd->add_flag("--distances", jl_distances_flag, "embed all pairwise differences");

    std::string verify_suite;
    auto* verify_cmd = app.add_subcommand("verify", "re-run built-in certification checks");
    verify_cmd->fallthrough();
    verify_cmd->add_option("suite", verify_suite, "engine | codes | fooling | moments | all")
        ->required()
        ->check(CLI::IsMember({"engine", "codes", "fooling", "moments", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : exit_parse;
    }

    auto started = std::chrono::steady_clock::now();
    Outcome out;
    try {
        if (app.got_subcommand(mis_cmd))
            out = cmd_mis(mis_file, mis_c, threads);
        else if (app.got_subcommand(gb_cmd))
            out = cmd_gb(gb_file, gb_automata_flag, threads);
        else if (app.got_subcommand(sd_cmd))
            out = cmd_setdisc(sd_file, sd_eps, threads);
        else if (app.got_subcommand(fool_cmd))
            out = cmd_fool(fool_file, fool_T, fool_eps, fool_family, threads);
        else if (app.got_subcommand(jl_cmd))
            out = cmd_jl(jl_file, jl_delta, jl_k, jl_distances_flag, threads);
        else
            out = cmd_verify(verify_suite, threads);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_parse;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_parse;
    }
    double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();

    if (json_out) {
        std::cout << out.doc.dump(2) << "\n";
    } else {
        for (const auto& line : out.human) std::cout << line << "\n";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", wall_ms);
        std::cout << "wall_ms: " << buf << "\n";
    }
    return out.code;
}
