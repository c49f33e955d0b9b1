#pragma once

#include <compare>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zkcontact/bytes.hpp"

namespace zkcontact {

/// Arbitrary-width unsigned integer, little-endian 64-bit limbs, always
/// normalized (no high zero limbs; zero is the empty limb vector).
class BigUint {
public:
    BigUint() = default;
    explicit BigUint(uint64_t v) {
        if (v != 0) limbs_.push_back(v);
    }

    static BigUint from_bytes_be(std::span<const uint8_t> bytes);
    static BigUint from_hex(std::string_view hex);
    static BigUint from_decimal(std::string_view dec);

    /// Big-endian bytes. With width_bytes == 0 the minimal encoding is
    /// returned (zero encodes as one zero byte); otherwise zero-padded to
    /// width_bytes, throwing if the value does not fit.
    Bytes to_bytes_be(size_t width_bytes = 0) const;
    std::string to_hex() const;
    std::string to_decimal() const;

    bool is_zero() const { return limbs_.empty(); }
    size_t bit_length() const;
    bool bit(size_t i) const;
    size_t limb_count() const { return limbs_.size(); }
    uint64_t limb(size_t i) const { return i < limbs_.size() ? limbs_[i] : 0; }
    const std::vector<uint64_t>& limbs() const { return limbs_; }
    uint64_t to_u64() const;

    friend BigUint operator+(const BigUint& a, const BigUint& b);
    friend BigUint operator-(const BigUint& a, const BigUint& b); // throws on underflow
    friend BigUint operator*(const BigUint& a, const BigUint& b);
    friend BigUint operator<<(const BigUint& a, size_t bits);
    friend BigUint operator>>(const BigUint& a, size_t bits);

    /// Quotient and remainder; throws on division by zero.
    static std::pair<BigUint, BigUint> divmod(const BigUint& a, const BigUint& b);
    friend BigUint operator/(const BigUint& a, const BigUint& b) { return divmod(a, b).first; }
    friend BigUint operator%(const BigUint& a, const BigUint& b) { return divmod(a, b).second; }

    std::strong_ordering operator<=>(const BigUint& other) const;
    bool operator==(const BigUint& other) const = default;

    static BigUint pow2(size_t bits);
    static BigUint modpow(const BigUint& base, const BigUint& exp, const BigUint& mod);
    /// Inverse of a modulo m; throws if gcd(a, m) != 1.
    static BigUint modinv(const BigUint& a, const BigUint& m);
    static BigUint gcd(BigUint a, BigUint b);

    /// Uniform value in [0, 2^bits).
    static BigUint random_bits(std::mt19937_64& rng, size_t bits);
    /// Uniform value in [0, bound) by rejection; bound must be nonzero.
    static BigUint random_below(std::mt19937_64& rng, const BigUint& bound);

private:
    void normalize();
    std::vector<uint64_t> limbs_;
};

/// Miller-Rabin with trial division; `rounds` random bases.
bool is_probable_prime(const BigUint& n, std::mt19937_64& rng, int rounds = 40);

} // namespace zkcontact
