#pragma once

#include <cstdint>
#include <vector>

#include "derand/gf2.hpp"

namespace derand {

// Forward declaration; defined in ensembles.hpp.
struct Ensemble;

namespace codes {

// Bit-packed codeword: coordinate c lives at word c/64, bit c%64.
using Word = std::vector<uint64_t>;

inline int word_count(int len) { return (len + 63) / 64; }
inline bool get_bit(const Word& w, int c) { return (w[c >> 6] >> (c & 63)) & 1; }
inline void set_bit(Word& w, int c) { w[c >> 6] |= 1ull << (c & 63); }
inline void xor_into(Word& a, const Word& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

// Linear binary code over a ground set: one length-L codeword per ground id.
struct BinaryCode {
    int length = 0;
    std::vector<Word> words;  // words[id]

    size_t ground_size() const { return words.size(); }
};

// Evaluation-point code: ground ids are (variable, level) pairs flattened as
// var * t + level. The codeword for (i, j) (1-based in the construction) is the
// concatenation of 2w+1 field elements alpha^(j + c*i), c = 0..2w, exponents
// mod 2^r - 1. r starts at ceil(log2(n*t)) and is bumped until n <= 2^r - 1 and
// t <= r, which keeps distinct ground ids on distinct codewords.
BinaryCode vandermonde_code(uint32_t n, uint32_t t, uint32_t w);

// XOR of the member codewords; empty set encodes to zero.
Word encode_set(const BinaryCode& code, const std::vector<uint32_t>& set);

// True iff distinct sets appearing in any ensemble's supports always get
// distinct codewords. The runtime guard in front of every lattice search.
bool verify_fools(const BinaryCode& code, const std::vector<Ensemble>& ensembles);

}  // namespace codes
}  // namespace derand
