#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace derand {

// Exact rational arithmetic everywhere the search invariants live.
using Rat = mpq_class;
using Int = mpz_class;

// p / 2^e
inline Rat dyadic(long p, unsigned e) {
    Rat r(p);
    Rat d(1);
    d <<= e;
    return r / d;
}

// Largest multiple of 2^-b not exceeding x, clamped to [0, 1].
inline Rat dyadic_floor(const Rat& x, unsigned b) {
    if (x <= 0) return Rat(0);
    if (x >= 1) return Rat(1);
    Int scaled = (x.get_num() << b) / x.get_den();  // floor: num, den > 0
    Rat r(scaled);
    Rat d(1);
    d <<= b;
    return r / d;
}

inline double to_double(const Rat& x) { return x.get_d(); }

// "p/q" or plain integer. Used for CLI rationals and vector files.
inline Rat parse_rat(const std::string& s) {
    // mpq_class(str) accepts "p/q" but asserts on garbage; validate first.
    if (s.empty()) throw std::invalid_argument("empty rational");
    mpq_t q;
    mpq_init(q);
    if (mpq_set_str(q, s.c_str(), 10) != 0) {
        mpq_clear(q);
        throw std::invalid_argument("bad rational: " + s);
    }
    mpq_canonicalize(q);
    Rat r(q);
    mpq_clear(q);
    return r;
}

// Decimal with an exact dyadic fraction part (e.g. "0.25", "-1.5").
inline Rat parse_decimal_or_rat(const std::string& s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) return parse_rat(s);
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    if (tail.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad decimal: " + s);
    bool neg = false;
    if (!head.empty() && (head[0] == '-' || head[0] == '+')) {
        neg = head[0] == '-';
        head = head.substr(1);
    }
    if (head.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad decimal: " + s);
    Int ip = head.empty() ? Int(0) : Int(head, 10);
    Int fp = tail.empty() ? Int(0) : Int(tail, 10);
    Int den = 1;
    for (size_t i = 0; i < tail.size(); ++i) den *= 10;
    Rat r = Rat(ip) + Rat(fp) / Rat(den);
    // Require the value to be exactly representable with a power-of-two denominator.
    Rat c = r;
    c.canonicalize();
    Int d = c.get_den();
    if (mpz_popcount(d.get_mpz_t()) != 1)
        throw std::invalid_argument("decimal is not exactly dyadic: " + s);
    return neg ? Rat(-c) : c;
}

inline std::string rat_str(const Rat& x) { return x.get_str(); }

inline int ceil_log2(uint64_t v) {
    if (v <= 1) return 0;
    int r = 0;
    uint64_t p = 1;
    while (p < v) {
        p <<= 1;
        ++r;
    }
    return r;
}

inline uint64_t bit_ceil64(uint64_t v) {
    uint64_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

}  // namespace derand
