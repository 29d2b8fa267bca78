#pragma once

#include <cstdint>
#include <vector>

namespace derand::gf2 {

// GF(2^r) for 1 <= r <= 32. Elements are bit-packed polynomials mod `modulus`.
// Construction verifies that the modulus is irreducible and that alpha generates
// the full multiplicative group; both checks throw on failure.
class Field {
  public:
    Field(int r, uint64_t modulus, uint32_t alpha);

    // Built-in modulus/alpha table entry for this degree, verified at construction.
    static Field standard(int r);

    int degree() const { return r_; }
    uint64_t modulus() const { return mod_; }
    uint32_t alpha() const { return alpha_; }
    uint64_t order() const { return (r_ == 64) ? ~0ull : ((1ull << r_) - 1); }

    uint32_t add(uint32_t a, uint32_t b) const { return a ^ b; }
    uint32_t mul(uint32_t a, uint32_t b) const;
    uint32_t pow(uint32_t a, uint64_t e) const;
    // alpha^e with e reduced mod 2^r - 1
    uint32_t alpha_pow(uint64_t e) const { return pow(alpha_, e % order()); }

  private:
    int r_;
    uint64_t mod_;
    uint32_t alpha_;
};

// Polynomial arithmetic over GF(2), used by the field checks and tests.
uint64_t poly_mod(uint64_t a, uint64_t m);      // a mod m, bit-packed
bool poly_irreducible(uint64_t m, int degree);  // trial division by all degrees <= degree/2

}  // namespace derand::gf2
