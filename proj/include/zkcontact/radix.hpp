#pragma once

#include <vector>

#include "zkcontact/biguint.hpp"
#include "zkcontact/field.hpp"

namespace zkcontact {

/// Digit parameters for big-integer arithmetic carried out in field elements.
/// radix_bits starts at bitlen(p)/2 - 2 and shrinks until a full convolution
/// coefficient plus its incoming carry provably stays below the field prime,
/// so the in-circuit multiplier can never wrap.
struct RadixParams {
    size_t radix_bits; // r: each digit in [0, 2^r)
    size_t digits;     // n: digit count covering width_bits
    size_t width_bits; // bound on the integers being decomposed

    /// Carry budget: carries in the canonicalization chain stay below
    /// 2^carry_bits().
    size_t carry_bits() const;

    static RadixParams choose(const Field& field, size_t width_bits);
};

/// Little-endian base-2^radix_bits digits of v, exactly params.digits of
/// them; throws if v does not fit.
std::vector<BigUint> radix_digits(const BigUint& v, const RadixParams& params);

/// (x * y) mod modulus via the same digit decomposition and convolution the
/// in-circuit multiplier uses. Requires x, y < modulus.
BigUint bigmul_radix(const BigUint& x, const BigUint& y, const BigUint& modulus,
                     const Field& field);

} // namespace zkcontact
