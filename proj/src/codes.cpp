#include "derand/codes.hpp"

#include <algorithm>
#include <stdexcept>

#include "derand/ensembles.hpp"
#include "derand/rational.hpp"

namespace derand::codes {

BinaryCode vandermonde_code(uint32_t n, uint32_t t, uint32_t w) {
    if (n == 0 || t == 0) throw std::invalid_argument("empty ground set");
    uint64_t ground = uint64_t(n) * t;
    int r = std::max(1, ceil_log2(ground));
    // Exponents are reduced mod 2^r - 1: distinct variables need distinct
    // alpha^i (n <= 2^r - 1) and within-block injectivity needs alpha^1..alpha^t
    // independent over GF(2) (t <= r with alpha = x).
    while (n > (1ull << r) - 1 || t > static_cast<uint32_t>(r)) ++r;
    if (r > 32) throw std::invalid_argument("ground set too large");
    gf2::Field f = gf2::Field::standard(r);

    BinaryCode code;
    code.length = r * (2 * w + 1);
    code.words.reserve(ground);
    int nw = word_count(code.length);
    for (uint32_t var = 0; var < n; ++var) {
        for (uint32_t lvl = 0; lvl < t; ++lvl) {
            uint64_t i = var + 1, j = lvl + 1;
            Word cw(nw, 0);
            for (uint32_t c = 0; c <= 2 * w; ++c) {
                uint32_t el = f.alpha_pow(j + uint64_t(c) * i);
                for (int k = 0; k < r; ++k) {
                    if ((el >> k) & 1) set_bit(cw, c * r + k);
                }
            }
            code.words.push_back(std::move(cw));
        }
    }
    return code;
}

Word encode_set(const BinaryCode& code, const std::vector<uint32_t>& set) {
    Word acc(word_count(code.length), 0);
    for (uint32_t id : set) {
        if (id >= code.ground_size()) throw std::out_of_range("ground id outside code");
        xor_into(acc, code.words[id]);
    }
    return acc;
}

bool verify_fools(const BinaryCode& code, const std::vector<Ensemble>& ensembles) {
    // Distinct support sets must have distinct codewords, per ensemble.
    for (const Ensemble& e : ensembles) {
        std::vector<std::pair<Word, const std::vector<uint32_t>*>> seen;
        for (const WeightedFamily* side : {&e.side1, &e.side2}) {
            for (const auto& [set, wt] : side->entries) {
                seen.emplace_back(encode_set(code, set), &set);
            }
        }
        std::sort(seen.begin(), seen.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t i = 1; i < seen.size(); ++i) {
            if (seen[i].first == seen[i - 1].first && *seen[i].second != *seen[i - 1].second)
                return false;
        }
    }
    return true;
}

}  // namespace derand::codes
