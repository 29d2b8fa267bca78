#include "derand/gbgame.hpp"

#include <cstdlib>
#include <istream>
#include <stdexcept>

#include "derand/oracles.hpp"

namespace derand {

SignMatrix SignMatrix::parse(std::istream& in) {
    SignMatrix m;
    if (!(in >> m.n) || m.n == 0) throw std::invalid_argument("bad matrix header");
    m.a.assign(m.n, std::vector<int>(m.n));
    for (auto& row : m.a)
        for (int& v : row) {
            if (!(in >> v)) throw std::invalid_argument("truncated matrix");
            if (v != 1 && v != -1) throw std::invalid_argument("matrix entries must be +-1");
        }
    return m;
}

std::vector<long> row_sums(const SignMatrix& m, const std::vector<int>& y) {
    std::vector<long> r(m.n, 0);
    for (uint32_t i = 0; i < m.n; ++i)
        for (uint32_t j = 0; j < m.n; ++j) r[i] += m.a[i][j] * y[j];
    return r;
}

namespace {

// Juntas whose sum over bit assignments equals R_i^2 = (sum_j a_ij y_j)^2,
// y_j = 1 - 2 z_j, scaled by c: one constant n c for the diagonal, one
// two-variable junta 2 c a_ij a_ij' y_j y_j' per column pair.
std::vector<Junta> square_juntas(const SignMatrix& m, uint32_t i, const Rat& c) {
    std::vector<Junta> out;
    out.push_back(constant_junta(c * static_cast<long>(m.n)));
    for (uint32_t j = 0; j < m.n; ++j)
        for (uint32_t j2 = j + 1; j2 < m.n; ++j2) {
            Rat w = 2 * c * m.a[i][j] * m.a[i][j2];
            Junta jt;
            jt.vars = {j, j2};
            jt.table = {w, -w, -w, w};
            out.push_back(std::move(jt));
        }
    return out;
}

}  // namespace

GbResult gb_solve(const SignMatrix& m, const EngineOptions& opts) {
    uint32_t n = m.n;
    Rat q = Rat(3) * (1 + 3 * Rat(n));

    StageBuilder build = [&](int, const std::vector<uint64_t>&) {
        std::vector<Group> gs(n);
        for (uint32_t i = 0; i < n; ++i) {
            gs[i].left = square_juntas(m, i, Rat(1));
            gs[i].right = square_juntas(m, i, -1 / q);
            gs[i].right.push_back(constant_junta(Rat(1)));
        }
        return gs;
    };

    EngineOptions eo = opts;
    eo.window = 1;
    eo.width = 2;
    EngineResult er = maximize_stages(n, 1, build, eo);

    GbResult res;
    res.expectation = std::move(er.expectation);
    res.sprime = er.value;
    res.trace = std::move(er.trace);
    res.y.resize(n);
    for (uint32_t j = 0; j < n; ++j) res.y[j] = er.x[j] ? -1 : 1;

    std::vector<long> r = row_sums(m, res.y);
    res.x.resize(n);
    Int total = 0;
    for (uint32_t i = 0; i < n; ++i) {
        res.x[i] = r[i] < 0 ? -1 : 1;
        total += std::labs(r[i]);
    }
    res.value = total;
    res.certified_sq = 27 * res.expectation * res.expectation / (4 * q);

    // S'(y) recomputed from the rows must match the engine trace
    Rat check;
    for (long ri : r) {
        Rat rr(ri);
        check += rr * rr - rr * rr * rr * rr / q;
    }
    if (check != res.sprime) throw std::logic_error("row sums disagree with the search value");
    if (res.expectation != oracles::gb_expected_sprime(n))
        throw std::logic_error("expectation disagrees with the closed form");
    return res;
}

}  // namespace derand
