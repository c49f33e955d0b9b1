#pragma once

#include <random>

#include "zkcontact/biguint.hpp"

namespace zkcontact {

/// Textbook RSA with public exponent 3 and no padding. The cube relation
/// sig^3 ≡ msg (mod N) is what the in-circuit verifier arithmetizes; unpadded
/// e=3 RSA is NOT a secure signature scheme and is used here only as the
/// verification relation of the reference protocol.
struct RsaPublicKey {
    BigUint n;
    static constexpr uint64_t public_exponent = 3;

    size_t bits() const { return n.bit_length(); }
    bool operator==(const RsaPublicKey&) const = default;
};

struct RsaKeyPair {
    RsaPublicKey pub;
    BigUint d; // cube-root exponent mod phi(n)
};

/// Generates primes congruent to 2 mod 3 (so cubing is invertible) with the
/// top two bits set, giving an exactly modulus_bits-wide n.
RsaKeyPair rsa_generate(std::mt19937_64& rng, size_t modulus_bits);

/// msg must be below n.
BigUint rsa_sign(const RsaKeyPair& key, const BigUint& msg);

/// True iff sig^3 mod n == msg; out-of-range inputs simply fail.
bool rsa_verify(const RsaPublicKey& pub, const BigUint& msg, const BigUint& sig);

} // namespace zkcontact
