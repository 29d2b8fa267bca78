#include "derand/gf2.hpp"

#include <stdexcept>

namespace derand::gf2 {

namespace {

int poly_deg(uint64_t p) {
    if (p == 0) return -1;
    return 63 - __builtin_clzll(p);
}

// Smallest primitive polynomial per degree, alpha = x throughout (alpha = 1 for
// degree 1). Re-verified at construction; a bad entry cannot survive the checks.
const uint64_t kPrimitive[33] = {
    0,
    0x3,          // degree 1
    0x7,          // degree 2
    0xb,          // degree 3
    0x13,         // degree 4
    0x25,         // degree 5
    0x43,         // degree 6
    0x83,         // degree 7
    0x11d,        // degree 8
    0x211,        // degree 9
    0x409,        // degree 10
    0x805,        // degree 11
    0x1053,       // degree 12
    0x201b,       // degree 13
    0x402b,       // degree 14
    0x8003,       // degree 15
    0x1002d,      // degree 16
    0x20009,      // degree 17
    0x40027,      // degree 18
    0x80027,      // degree 19
    0x100009,     // degree 20
    0x200005,     // degree 21
    0x400003,     // degree 22
    0x800021,     // degree 23
    0x100001b,    // degree 24
    0x2000009,    // degree 25
    0x4000047,    // degree 26
    0x8000027,    // degree 27
    0x10000009,   // degree 28
    0x20000005,   // degree 29
    0x40000053,   // degree 30
    0x80000009,   // degree 31
    0x1000000afull,  // degree 32
};

// Factor v by trial division; 2^r-1 for r <= 32 has no composite cofactor
// after removing primes <= 2^16.
std::vector<uint64_t> prime_factors(uint64_t v) {
    std::vector<uint64_t> fs;
    for (uint64_t p = 2; p <= 65536 && p * p <= v; ++p) {
        if (v % p == 0) {
            fs.push_back(p);
            while (v % p == 0) v /= p;
        }
    }
    if (v > 1) fs.push_back(v);
    return fs;
}

}  // namespace

uint64_t poly_mod(uint64_t a, uint64_t m) {
    int dm = poly_deg(m);
    int da = poly_deg(a);
    while (da >= dm) {
        a ^= m << (da - dm);
        da = poly_deg(a);
    }
    return a;
}

bool poly_irreducible(uint64_t m, int degree) {
    if (poly_deg(m) != degree) return false;
    if (degree == 1) return true;
    if ((m & 1) == 0) return false;  // divisible by x
    for (int d = 1; d <= degree / 2; ++d) {
        for (uint64_t p = (1ull << d); p < (2ull << d); ++p) {
            if (poly_mod(m, p) == 0) return false;
        }
    }
    return true;
}

Field::Field(int r, uint64_t modulus, uint32_t alpha) : r_(r), mod_(modulus), alpha_(alpha) {
    if (r < 1 || r > 32) throw std::invalid_argument("field degree out of range");
    if (!poly_irreducible(modulus, r)) throw std::invalid_argument("modulus not irreducible");
    if (alpha == 0 || (r < 32 && alpha >= (1u << r)))
        throw std::invalid_argument("alpha out of range");
    uint64_t ord = order();
    if (r <= 20) {
        // Exhaustive: alpha^k != 1 for 1 <= k < 2^r - 1.
        uint32_t v = alpha;
        for (uint64_t k = 1; k < ord; ++k) {
            if (v == 1) throw std::invalid_argument("alpha not primitive");
            v = mul(v, alpha);
        }
        if (v != 1) throw std::invalid_argument("alpha order mismatch");
    } else {
        for (uint64_t p : prime_factors(ord)) {
            if (pow(alpha, ord / p) == 1) throw std::invalid_argument("alpha not primitive");
        }
    }
}

Field Field::standard(int r) {
    if (r < 1 || r > 32) throw std::invalid_argument("field degree out of range");
    uint32_t a = (r == 1) ? 1u : 2u;
    return Field(r, kPrimitive[r], a);
}

uint32_t Field::mul(uint32_t a, uint32_t b) const {
    // Carry-less multiply then reduce; products fit in 64 bits for r <= 32.
    uint64_t acc = 0;
    uint64_t aa = a;
    while (b) {
        if (b & 1) acc ^= aa;
        aa <<= 1;
        b >>= 1;
    }
    return static_cast<uint32_t>(poly_mod(acc, mod_));
}

uint32_t Field::pow(uint32_t a, uint64_t e) const {
    uint32_t result = 1, base = a;
    while (e) {
        if (e & 1) result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

}  // namespace derand::gf2
