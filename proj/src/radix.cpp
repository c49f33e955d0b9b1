#include "zkcontact/radix.hpp"

#include <bit>

#include "zkcontact/errors.hpp"

namespace zkcontact {

size_t RadixParams::carry_bits() const {
    // Carries are bounded by n * 2^r (see choose()).
    return radix_bits + std::bit_width(digits);
}

RadixParams RadixParams::choose(const Field& field, size_t width_bits) {
    if (width_bits == 0) throw Error("radix width must be positive");
    size_t start = field.bits() / 2;
    if (start <= 2) throw Error("field too small for radix arithmetic");
    for (size_t r = start - 2; r >= 1; --r) {
        size_t n = (width_bits + r - 1) / r;
        RadixParams candidate{r, n, width_bits};
        // Largest value in the carry chain: a coefficient of n digit
        // products plus a carry < n * 2^r.
        BigUint dmax = BigUint::pow2(r) - BigUint(1);
        BigUint worst = BigUint(n) * dmax * dmax + BigUint(n) * BigUint::pow2(r);
        // A range-checked digit/carry pair recomposes as digit + 2^r * carry;
        // that too must stay below the prime for the split to be exact.
        BigUint recompose = BigUint::pow2(r + candidate.carry_bits());
        if (worst < field.prime() && recompose < field.prime()) return candidate;
        if (r == 1) break;
    }
    throw Error("no usable radix for this field and width");
}

std::vector<BigUint> radix_digits(const BigUint& v, const RadixParams& params) {
    std::vector<BigUint> out;
    out.reserve(params.digits);
    BigUint rest = v;
    for (size_t i = 0; i < params.digits; ++i) {
        BigUint high = rest >> params.radix_bits;
        out.push_back(rest - (high << params.radix_bits));
        rest = std::move(high);
    }
    if (!rest.is_zero()) throw Error("value exceeds digit capacity");
    return out;
}

BigUint bigmul_radix(const BigUint& x, const BigUint& y, const BigUint& modulus,
                     const Field& field) {
    if (modulus.is_zero()) throw Error("bigmul_radix modulus is zero");
    if (x >= modulus || y >= modulus) throw Error("bigmul_radix operand not below modulus");
    RadixParams params = RadixParams::choose(field, modulus.bit_length());
    std::vector<BigUint> xd = radix_digits(x, params);
    std::vector<BigUint> yd = radix_digits(y, params);

    BigUint acc;
    for (size_t j = 0; j + 1 < 2 * params.digits; ++j) {
        BigUint coeff;
        size_t lo = j >= params.digits ? j - params.digits + 1 : 0;
        for (size_t i = lo; i <= j && i < params.digits; ++i) {
            coeff = coeff + xd[i] * yd[j - i];
        }
        acc = acc + (coeff << (params.radix_bits * j));
    }
    return acc % modulus;
}

} // namespace zkcontact
