#include "derand/oracles.hpp"

#include <cstdlib>
#include <stdexcept>

namespace derand::oracles {

namespace {

void check_size(uint32_t nvars, int bits) {
    if (bits <= 0 || nvars * static_cast<uint64_t>(bits) > 24)
        throw std::invalid_argument("exhaustive oracle limited to 24 total bits");
}

}  // namespace

Rat exhaustive_expectation(uint32_t nvars, int bits, const PointFn& f) {
    check_size(nvars, bits);
    uint64_t total_bits = nvars * static_cast<uint64_t>(bits);
    uint64_t mask = (uint64_t{1} << bits) - 1;
    Rat sum;
    std::vector<uint64_t> z(nvars);
    for (uint64_t packed = 0; packed < (uint64_t{1} << total_bits); ++packed) {
        for (uint32_t v = 0; v < nvars; ++v) z[v] = (packed >> (v * bits)) & mask;
        sum += f(z);
    }
    Rat den(1);
    den <<= static_cast<unsigned>(total_bits);
    return sum / den;
}

ArgmaxResult exhaustive_argmax(uint32_t nvars, int bits, const PointFn& f) {
    check_size(nvars, bits);
    uint64_t total_bits = nvars * static_cast<uint64_t>(bits);
    uint64_t mask = (uint64_t{1} << bits) - 1;
    ArgmaxResult best;
    std::vector<uint64_t> z(nvars);
    for (uint64_t packed = 0; packed < (uint64_t{1} << total_bits); ++packed) {
        for (uint32_t v = 0; v < nvars; ++v) z[v] = (packed >> (v * bits)) & mask;
        Rat v = f(z);
        if (packed == 0 || v > best.value) {
            best.value = std::move(v);
            best.z = z;
        }
    }
    return best;
}

Rat gb_expected_sprime(uint32_t n) {
    Rat q = Rat(3) * (1 + 3 * Rat(n));
    return Rat(n) * (Rat(n) - (3 * Rat(n) * Rat(n) - 2 * Rat(n)) / q);
}

Rat dp_abs_expectation(const std::vector<long>& a) {
    if (a.size() > 64) throw std::invalid_argument("dp oracle limited to 64 terms");
    long span = 0;
    for (long v : a) span += std::labs(v);
    std::vector<Int> count(2 * span + 1);
    count[span] = 1;  // offset by +span
    for (long v : a) {
        std::vector<Int> next(count.size());
        long stepped = std::labs(v);
        // reachable sums stay within +-span, so the shifts cannot escape
        for (long s = 0; s < static_cast<long>(count.size()); ++s) {
            if (count[s] == 0) continue;
            next[s + stepped] += count[s];
            next[s - stepped] += count[s];
        }
        count.swap(next);
    }
    Rat num;
    for (long s = 0; s < static_cast<long>(count.size()); ++s)
        if (count[s] != 0) num += Rat(count[s]) * Rat(std::labs(s - span));
    Rat den(1);
    den <<= static_cast<unsigned>(a.size());
    return num / den;
}

}  // namespace derand::oracles
