#include "derand/apps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "derand/oracles.hpp"

namespace derand::apps {

namespace {

using automata::AutomatonSystem;
using automata::BitString;
using automata::CanonicalFamily;
using automata::CounterSpec;
using automata::FooledDistribution;
using automata::TableKind;

Rat frac(uint64_t num, uint64_t den) {
    Rat r(static_cast<unsigned long>(num), static_cast<unsigned long>(den));
    r.canonicalize();
    return r;
}

Rat rat_abs(const Rat& v) { return v < 0 ? Rat(-v) : v; }

// floor(scale * ln(arg)), refusing values long double cannot separate from an
// integer
long floor_scaled_log(long double scale, long double arg) {
    long double v = scale * std::log(arg);
    long double f = std::floor(v);
    if (v - f < 1e-9L || f + 1.0L - v < 1e-9L)
        throw std::runtime_error("log threshold too close to an integer");
    return static_cast<long>(f);
}

// nearest integer, halves away from zero
Int round_half_away(const Rat& v) {
    if (v < 0) return Int(-round_half_away(Rat(-v)));
    Rat s = v + dyadic(1, 1);
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
    return q;
}

long round_half_away_long(const Rat& v) {
    Int q = round_half_away(v);
    if (!q.fits_slong_p()) throw std::overflow_error("quantized value out of range");
    return q.get_si();
}

bool is_dyadic(const Rat& v) {
    return mpz_popcount(v.get_den_mpz_t()) == 1;
}

}  // namespace

automata::AutomatonSystem row_counter_system(const std::vector<std::vector<long>>& rows,
                                             uint32_t eta) {
    if (rows.empty()) throw std::invalid_argument("no rows");
    size_t n = rows[0].size();
    if (n == 0) throw std::invalid_argument("empty rows");
    uint64_t reach = 0;
    for (const auto& row : rows) {
        if (row.size() != n) throw std::invalid_argument("ragged rows");
        uint64_t sum = 0;
        for (long a : row) sum += static_cast<uint64_t>(std::labs(a));
        reach = std::max(reach, sum);
    }
    if (eta % 2 == 0 || eta < 2 * reach + 1)
        throw std::invalid_argument("eta must be odd and exceed twice the reachable sum");
    CounterSpec spec;
    spec.m = static_cast<uint32_t>(rows.size());
    spec.eta = eta;
    spec.T = static_cast<int>(std::bit_ceil(n));
    spec.inc.assign(rows.size(), std::vector<std::array<long, 2>>(
                                     static_cast<size_t>(spec.T), {0, 0}));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t t = 0; t < n; ++t) spec.inc[i][t] = {-rows[i][t], rows[i][t]};
    return automata::make_counter_system(std::move(spec));
}

long decode_sum(uint32_t s, uint32_t eta) {
    return s <= (eta - 1) / 2 ? static_cast<long>(s)
                              : static_cast<long>(s) - static_cast<long>(eta);
}

SetDiscResult set_discrepancy(const std::vector<std::vector<int>>& matrix,
                              const SetDiscOptions& opts) {
    size_t m = matrix.size();
    if (m == 0) throw std::invalid_argument("empty matrix");
    size_t n = matrix[0].size();
    std::vector<std::vector<long>> rows(m);
    for (size_t i = 0; i < m; ++i) {
        if (matrix[i].size() != n) throw std::invalid_argument("ragged matrix");
        for (int a : matrix[i]) {
            if (a < -1 || a > 1) throw std::invalid_argument("entries must be -1, 0, or 1");
            rows[i].push_back(a);
        }
    }

    uint32_t eta = static_cast<uint32_t>(2 * n + 1);
    auto sys = row_counter_system(rows, eta);
    auto fam = automata::canonical_counter(sys);
    Rat eps = opts.eps == 0 ? frac(1, 2 * m) : opts.eps;
    auto fr = automata::fool(sys, 0, sys.T, eps, fam, opts.reduce);

    SetDiscResult res;
    res.eps = eps;
    res.lambda_sq = floor_scaled_log(2.0L * static_cast<long double>(n),
                                     4.0L * static_cast<long double>(m));
    res.support = fr.dist.strings.size();
    res.fool_err_bound = fr.err_bound;

    auto marg = automata::uniform_marginals(sys, 0, sys.T);
    res.p_uniform = 0;
    for (size_t i = 0; i < m; ++i)
        for (uint32_t s = 0; s < eta; ++s) {
            long v = decode_sum(s, eta);
            if (v * v > res.lambda_sq) res.p_uniform += marg[i][0][s];
        }
    Rat err_half = 0;
    for (const Rat& e : fr.err_each) err_half += e / 2;
    res.exists_bound = res.p_uniform + err_half;
    res.guaranteed = res.exists_bound < 1;

    size_t best = SIZE_MAX;
    for (size_t v = 0; v < fr.dist.strings.size(); ++v) {
        bool ok = true;
        for (size_t i = 0; i < m && ok; ++i) {
            long sum = fr.dist.true_offsets[v][i];
            ok = sum * sum <= res.lambda_sq;
        }
        if (ok && (best == SIZE_MAX ||
                   automata::lex_less(fr.dist.strings[v], fr.dist.strings[best])))
            best = v;
    }
    if (best == SIZE_MAX) {
        if (res.guaranteed) throw std::logic_error("existence bound violated by the scan");
        throw std::runtime_error("no support string met the discrepancy bound; existence bound " +
                                 rat_str(res.exists_bound));
    }

    res.signs.resize(n);
    for (size_t t = 0; t < n; ++t)
        res.signs[t] = fr.dist.strings[best].bit(static_cast<int>(t)) ? 1 : -1;
    res.sums.resize(m);
    for (size_t i = 0; i < m; ++i) {
        long sum = 0;
        for (size_t t = 0; t < n; ++t) sum += res.signs[t] * rows[i][t];
        if (sum != fr.dist.true_offsets[best][i])
            throw std::logic_error("selected sums disagree with the distribution bookkeeping");
        res.sums[i] = sum;
        res.max_abs = std::max(res.max_abs, std::labs(sum));
    }
    return res;
}

GbAutomataResult gb_automata(const std::vector<std::vector<int>>& matrix,
                             const GbAutomataOptions& opts) {
    size_t n = matrix.size();
    if (n == 0 || n > 64) throw std::invalid_argument("matrix side must be in 1..64");
    std::vector<std::vector<long>> rows(n);
    for (size_t i = 0; i < n; ++i) {
        if (matrix[i].size() != n) throw std::invalid_argument("matrix must be square");
        for (int a : matrix[i]) {
            if (a != 1 && a != -1) throw std::invalid_argument("entries must be +-1");
            rows[i].push_back(a);
        }
    }

    uint32_t eta = static_cast<uint32_t>(2 * n + 1);
    auto sys = row_counter_system(rows, eta);
    auto fam = automata::canonical_counter(sys);
    Rat eps = opts.eps == 0
                  ? dyadic(1, static_cast<unsigned>((ceil_log2(static_cast<uint64_t>(n)) + 1) / 2))
                  : opts.eps;
    auto fr = automata::fool(sys, 0, sys.T, eps, fam, opts.reduce);

    size_t best = SIZE_MAX;
    long best_val = -1;
    for (size_t v = 0; v < fr.dist.strings.size(); ++v) {
        long val = 0;
        for (size_t i = 0; i < n; ++i) val += std::labs(fr.dist.true_offsets[v][i]);
        if (best == SIZE_MAX || val > best_val ||
            (val == best_val && automata::lex_less(fr.dist.strings[v], fr.dist.strings[best]))) {
            best = v;
            best_val = val;
        }
    }

    GbAutomataResult res;
    res.eps = eps;
    res.support = fr.dist.strings.size();
    res.fool_err_bound = fr.err_bound;
    res.y.resize(n);
    for (size_t t = 0; t < n; ++t)
        res.y[t] = fr.dist.strings[best].bit(static_cast<int>(t)) ? 1 : -1;
    res.x.resize(n);
    res.value = 0;
    for (size_t i = 0; i < n; ++i) {
        long r = 0;
        for (size_t j = 0; j < n; ++j) r += rows[i][j] * res.y[j];
        if (r != fr.dist.true_offsets[best][i])
            throw std::logic_error("selected sums disagree with the distribution bookkeeping");
        res.x[i] = r >= 0 ? 1 : -1;
        res.value += std::labs(r);
    }
    if (res.value != best_val) throw std::logic_error("scan value mismatch");

    res.expected_uniform = 0;
    for (size_t i = 0; i < n; ++i) res.expected_uniform += oracles::dp_abs_expectation(rows[i]);
    Rat err_sum = 0;
    for (const Rat& e : fr.err_each) err_sum += e;
    res.bound_apriori =
        res.expected_uniform - eps * Rat(static_cast<unsigned long>(n * n));
    res.bound_measured =
        res.expected_uniform - err_sum * Rat(static_cast<unsigned long>(n)) / 2;
    return res;
}

JlResult jl_transform(const std::vector<std::vector<Rat>>& vectors, const Rat& delta,
                      const JlOptions& opts) {
    size_t nv = vectors.size();
    if (nv == 0) throw std::invalid_argument("no vectors");
    size_t d0 = vectors[0].size();
    if (d0 == 0) throw std::invalid_argument("empty vectors");
    if (delta <= 0 || delta >= 1 || !is_dyadic(delta))
        throw std::invalid_argument("delta must be a dyadic rational in (0, 1)");
    Rat norm_tol = dyadic(1, 20);
    for (const auto& u : vectors) {
        if (u.size() != d0) throw std::invalid_argument("mixed dimensions");
        Rat nsq = 0;
        for (const Rat& c : u) nsq += c * c;
        if (rat_abs(nsq - 1) > norm_tol)
            throw std::invalid_argument("vectors must have unit norm within 2^-20");
    }

    uint64_t k;
    if (opts.k > 0) {
        k = std::bit_ceil(static_cast<uint64_t>(opts.k));
    } else {
        long double need = 8.0L / Rat(delta * delta).get_d() *
                           std::log(static_cast<long double>(std::max<size_t>(nv, 2)));
        k = std::bit_ceil(static_cast<uint64_t>(std::ceil(need)));
    }
    uint64_t d = std::bit_ceil(static_cast<uint64_t>(d0));
    if (k > (uint64_t(1) << 20) || d > (uint64_t(1) << 20))
        throw std::invalid_argument("dimensions too large");

    JlResult res;
    res.d = static_cast<uint32_t>(d);
    res.k = static_cast<uint32_t>(k);
    res.delta = delta;
    res.quant_step = delta * delta / Rat(static_cast<unsigned long>(d * k));
    res.window_radius = static_cast<long>(std::ceil(
        4.0L * std::sqrt(std::log(2.0L * static_cast<long double>(nv) *
                                  static_cast<long double>(k)))));
    res.stage1_eps = opts.eps1 == 0 ? frac(1, nv * k) : opts.eps1;
    res.stage2_eps = opts.eps2 == 0 ? frac(1, nv) : opts.eps2;

    const Rat& x = res.quant_step;
    std::vector<std::vector<long>> uhat(nv);
    uint64_t reach = 0;
    for (size_t i = 0; i < nv; ++i) {
        uint64_t sum = 0;
        for (const Rat& c : vectors[i]) {
            long q = round_half_away_long(c / x);
            uhat[i].push_back(q);
            sum += static_cast<uint64_t>(std::labs(q));
        }
        reach = std::max(reach, sum);
    }
    if (reach > (uint64_t(1) << 30))
        throw std::invalid_argument("quantization too fine for the state space");
    uint32_t eta1 = static_cast<uint32_t>(2 * reach + 1);

    auto sys1 = row_counter_system(uhat, eta1);
    auto fam1 = automata::canonical_counter(sys1);
    auto f1 = automata::fool(sys1, 0, sys1.T, res.stage1_eps, fam1, opts.reduce);
    res.stage1_err_bound = f1.err_bound;

    // squared row sums quantized to multiples of delta^2 / k
    Rat qscale = delta * delta / Rat(static_cast<unsigned long>(d * d * k));
    auto qsq = [&qscale](long shat) -> long {
        return round_half_away_long(Rat(shat) * Rat(shat) * qscale);
    };
    uint64_t qmax = 0;
    for (size_t i = 0; i < nv; ++i) {
        uint64_t sum = 0;
        for (long q : uhat[i]) sum += static_cast<uint64_t>(std::labs(q));
        qmax = std::max(qmax, static_cast<uint64_t>(qsq(static_cast<long>(sum))));
    }
    uint64_t eta2_wide = 1 + k * qmax;
    if (eta2_wide > (uint64_t(1) << 31))
        throw std::invalid_argument("squared-sum state space too large");
    uint32_t eta2 = static_cast<uint32_t>(eta2_wide);

    auto sys2 = automata::make_system(
        static_cast<uint32_t>(nv), eta2, static_cast<int>(k),
        [](uint32_t, int, uint32_t, int) -> uint32_t {
            throw std::logic_error("row-window system has no per-bit transition");
        });
    CanonicalFamily fam2{TableKind::counter};

    FooledDistribution cur;
    cur.t = 0;
    cur.h = 1;
    cur.kind = TableKind::counter;
    cur.strings = f1.dist.strings;
    cur.offsets.resize(cur.strings.size());
    cur.true_offsets.resize(cur.strings.size());
    for (size_t v = 0; v < cur.strings.size(); ++v)
        for (size_t i = 0; i < nv; ++i) {
            long q = qsq(f1.dist.true_offsets[v][i]);
            cur.offsets[v].push_back(static_cast<uint32_t>(q));
            cur.true_offsets[v].push_back(q);
        }
    std::vector<Rat> err_cur = f1.err_each;

    for (uint64_t lvl = 1; lvl < k; lvl <<= 1) {
        Rat eps_step = res.stage2_eps * frac(2 * lvl, k);
        auto d2 = automata::shift_window(cur, static_cast<int>(lvl));
        auto rr = automata::reduce(sys2, cur, d2, eps_step, fam2, opts.reduce);
        for (size_t i = 0; i < nv; ++i)
            err_cur[i] = rr.report.err_each[i] + 2 * err_cur[i];
        res.stage2.push_back(rr.report);
        cur = std::move(rr.dist);
    }
    res.err_each = std::move(err_cur);
    res.support = cur.strings.size();

    // judge every support string on exact norms
    auto norms_at = [&](size_t v) -> std::vector<Rat> {
        std::vector<Rat> out(nv);
        for (size_t i = 0; i < nv; ++i) {
            Rat acc = 0;
            for (uint64_t r = 0; r < k; ++r) {
                Rat dot = 0;
                for (size_t j = 0; j < d0; ++j) {
                    int sign = cur.strings[v].bit(static_cast<int>(r * d + j)) ? 1 : -1;
                    dot += sign * vectors[i][j];
                }
                acc += dot * dot;
            }
            out[i] = acc / Rat(static_cast<unsigned long>(k));
        }
        return out;
    };
    Rat pass_tol = 2 * delta;
    size_t best = SIZE_MAX;
    Rat best_worst;
    bool best_pass = false;
    for (size_t v = 0; v < cur.strings.size(); ++v) {
        auto norms = norms_at(v);
        Rat worst = 0;
        for (const Rat& nq : norms) worst = std::max(worst, rat_abs(nq - 1));
        bool pass = worst <= pass_tol;
        bool better;
        if (best == SIZE_MAX) {
            better = true;
        } else if (pass != best_pass) {
            better = pass;
        } else if (pass) {
            better = automata::lex_less(cur.strings[v], cur.strings[best]);
        } else {
            better = worst < best_worst ||
                     (worst == best_worst &&
                      automata::lex_less(cur.strings[v], cur.strings[best]));
        }
        if (better) {
            best = v;
            best_worst = worst;
            best_pass = pass;
        }
    }
    res.certified = best_pass;
    res.worst_distortion = best_worst;

    res.matrix.assign(k, std::vector<int>(d0));
    for (uint64_t r = 0; r < k; ++r)
        for (size_t j = 0; j < d0; ++j)
            res.matrix[r][j] = cur.strings[best].bit(static_cast<int>(r * d + j)) ? 1 : -1;
    auto norms = norms_at(best);
    for (size_t i = 0; i < nv; ++i) {
        JlVectorReport rep;
        rep.norm_sq = norms[i];
        rep.distortion = rat_abs(rep.norm_sq - 1);
        Int ssq = 0;
        for (uint64_t r = 0; r < k; ++r) {
            long shat = 0;
            for (size_t j = 0; j < d0; ++j) shat += res.matrix[r][j] * uhat[i][j];
            ssq += Int(shat) * Int(shat);
        }
        rep.proxy_sq = x * x * Rat(ssq) / Rat(static_cast<unsigned long>(k));
        rep.proxy_gap = rat_abs(rep.proxy_sq - rep.norm_sq);
        rep.pass = rep.distortion <= pass_tol;
        res.reports.push_back(std::move(rep));
    }
    return res;
}

JlDistancesResult jl_distances(const std::vector<std::vector<Rat>>& vectors, const Rat& delta,
                               const JlOptions& opts) {
    size_t nv = vectors.size();
    if (nv < 2) throw std::invalid_argument("need at least two vectors");
    size_t d0 = vectors[0].size();
    for (const auto& u : vectors)
        if (u.size() != d0) throw std::invalid_argument("mixed dimensions");

    JlDistancesResult res;
    std::vector<std::vector<Rat>> scaled;
    std::vector<Rat> rho_sq_w;
    Rat window = dyadic(1, 21);
    for (size_t a = 0; a < nv; ++a)
        for (size_t b = a + 1; b < nv; ++b) {
            std::vector<Rat> w(d0);
            Rat wsq = 0;
            for (size_t j = 0; j < d0; ++j) {
                w[j] = vectors[a][j] - vectors[b][j];
                wsq += w[j] * w[j];
            }
            if (wsq == 0) continue;

            // smallest dyadic rho = r / 2^44 with rho^2 wsq >= 1 - 2^-21
            const unsigned shift = 44;
            Rat lo_target = 1 - window;
            auto scaled_sq = [&wsq, shift](long r) -> Rat {
                return Rat(r) * Rat(r) * wsq / Rat(Int(1) << (2 * shift));
            };
            long hi = 1;
            while (scaled_sq(hi) < lo_target) {
                if (hi > (long(1) << 60)) throw std::runtime_error("difference too small to rescale");
                hi <<= 1;
            }
            long lo = hi / 2;
            while (lo + 1 < hi) {
                long mid = lo + (hi - lo) / 2;
                if (scaled_sq(mid) < lo_target)
                    lo = mid;
                else
                    hi = mid;
            }
            Rat rho = dyadic(hi, shift);
            Rat rsw = rho * rho * wsq;
            if (rat_abs(rsw - 1) > window)
                throw std::runtime_error("difference too extreme to rescale");

            JlPair pair;
            pair.a = a;
            pair.b = b;
            pair.dist_sq = wsq;
            res.pairs.push_back(std::move(pair));
            rho_sq_w.push_back(rsw);
            for (Rat& c : w) c *= rho;
            scaled.push_back(std::move(w));
        }
    if (scaled.empty()) throw std::invalid_argument("all pairwise differences are zero");

    res.transform = jl_transform(scaled, delta, opts);
    for (size_t t = 0; t < res.pairs.size(); ++t) {
        res.pairs[t].mapped_ratio = res.transform.reports[t].norm_sq / rho_sq_w[t];
        res.pairs[t].distortion = rat_abs(res.pairs[t].mapped_ratio - 1);
    }
    return res;
}

}  // namespace derand::apps
