#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "derand/bilinear.hpp"

// Direct evaluation of engine groups at a full assignment, for oracle checks.
inline derand::Rat eval_junta(const derand::Junta& j, int window, const std::vector<uint64_t>& z) {
    size_t idx = 0;
    for (size_t a = 0; a < j.vars.size(); ++a) idx |= static_cast<size_t>(z[j.vars[a]]) << (a * window);
    return j.table[idx];
}

inline derand::Rat eval_groups(const std::vector<derand::Group>& gs, int window,
                               const std::vector<uint64_t>& z) {
    derand::Rat s;
    for (const derand::Group& g : gs) {
        derand::Rat l, r;
        for (const derand::Junta& j : g.left) l += eval_junta(j, window, z);
        for (const derand::Junta& j : g.right) r += eval_junta(j, window, z);
        s += l * r;
    }
    return s;
}

inline derand::Rat random_dyadic(std::mt19937_64& rng, long lo, long hi, unsigned bits) {
    long span = hi - lo + 1;
    return derand::dyadic(lo + static_cast<long>(rng() % span), bits);
}

inline std::vector<derand::Rat> random_table(std::mt19937_64& rng, size_t size) {
    std::vector<derand::Rat> t(size);
    for (derand::Rat& v : t) v = random_dyadic(rng, -32, 31, 4);
    return t;
}
