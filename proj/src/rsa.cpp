#include "zkcontact/rsa.hpp"

#include "zkcontact/errors.hpp"

namespace zkcontact {

namespace {

BigUint random_prime_2mod3(std::mt19937_64& rng, size_t bits) {
    if (bits < 8) throw Error("prime width too small");
    for (;;) {
        // Top two bits set keep p*q at full width; force odd.
        BigUint cand = BigUint::random_bits(rng, bits - 2) + BigUint::pow2(bits - 1) +
                       BigUint::pow2(bits - 2);
        if (!cand.bit(0)) cand = cand + BigUint(1);
        if ((cand % BigUint(3)) != BigUint(2)) continue;
        if (is_probable_prime(cand, rng)) return cand;
    }
}

} // namespace

RsaKeyPair rsa_generate(std::mt19937_64& rng, size_t modulus_bits) {
    if (modulus_bits < 16 || modulus_bits % 2 != 0) {
        throw Error("RSA modulus width must be even and at least 16");
    }
    size_t half = modulus_bits / 2;
    BigUint p = random_prime_2mod3(rng, half);
    BigUint q;
    do {
        q = random_prime_2mod3(rng, half);
    } while (q == p);

    BigUint n = p * q;
    BigUint phi = (p - BigUint(1)) * (q - BigUint(1));
    BigUint d = BigUint::modinv(BigUint(3), phi);
    return {RsaPublicKey{std::move(n)}, std::move(d)};
}

BigUint rsa_sign(const RsaKeyPair& key, const BigUint& msg) {
    if (msg >= key.pub.n) throw Error("RSA message exceeds modulus");
    return BigUint::modpow(msg, key.d, key.pub.n);
}

bool rsa_verify(const RsaPublicKey& pub, const BigUint& msg, const BigUint& sig) {
    if (pub.n.is_zero() || msg >= pub.n || sig >= pub.n) return false;
    return BigUint::modpow(sig, BigUint(RsaPublicKey::public_exponent), pub.n) == msg;
}

} // namespace zkcontact
