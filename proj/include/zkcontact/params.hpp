#pragma once

#include <cstdint>

#include "zkcontact/gadgets.hpp"

namespace zkcontact {

/// Diagnosis status codes as they enter the diagnosis hash.
inline constexpr uint64_t kStatusPositive = 1;
inline constexpr uint64_t kStatusNegative = 2;

/// Fixed bit widths of hash-input components.
inline constexpr size_t kEpochBits = 32;
inline constexpr size_t kStatusBits = 8;

/// Everything the protocol agrees on out of band: epoch geometry, the three
/// time windows (all measured in epochs), the field, the RSA modulus width,
/// and the four subset-sum hash instances. Instances are value types; two
/// parties interoperate iff their ProtocolParams compare equal.
struct ProtocolParams {
    const Field* field = nullptr;
    uint32_t epoch_seconds = 300;
    uint32_t contact_window_epochs = 4032; // W: report horizon after contact
    uint32_t incubation_epochs = 864;      // I: transitive-hop spacing
    uint32_t health_window_epochs = 288;   // D: proof-of-health freshness
    uint32_t rsa_modulus_bits = 2048;
    // The transitive compliance predicate enforces t1 + I ≤ t2 ≤ t1 + W;
    // each bound can be switched off independently.
    bool m1_lower_bound = true;
    bool m1_upper_bound = true;

    SubsetSumParams diag_hash;      // h_s = H(S ‖ status ‖ t_diag)
    SubsetSumParams token_hash;     // token digest = H1(S ‖ t)
    SubsetSumParams contact_hash;   // h = H2(lo ‖ hi ‖ t)
    SubsetSumParams authority_hash; // key commitment over modulus bits

    /// Secrets and tokens are one bit narrower than the field so every value
    /// round-trips through a field element unambiguously.
    size_t secret_bits() const { return field->bits() - 1; }
    size_t token_bits() const { return field->bits() - 1; }

    /// Windows derive from the epoch length: W = 14 days, I = 3 days,
    /// D = 1 day. epoch_seconds must divide a day.
    static ProtocolParams make(const Field& field, uint32_t rsa_modulus_bits = 2048,
                               uint32_t epoch_seconds = 300);

    void validate() const; // throws Error on inconsistent parameters

    bool operator==(const ProtocolParams&) const = default;
};

/// Little-endian bits of v, exactly `width` of them; throws if v needs more.
std::vector<bool> value_bits_le(const BigUint& v, size_t width);

/// h_s: binds a secret to a diagnosis status and epoch.
FieldElement diag_digest_eval(const ProtocolParams& p, const BigUint& secret, uint64_t status,
                              uint32_t t_diag);

/// Full H1 digest of (secret, epoch); the broadcast token is its low
/// token_bits() bits.
FieldElement token_digest_eval(const ProtocolParams& p, const BigUint& secret, uint32_t t);
BigUint derive_token(const ProtocolParams& p, const BigUint& secret, uint32_t t);

/// h: order-insensitive digest of a token pair and the contact epoch.
FieldElement contact_digest_eval(const ProtocolParams& p, const BigUint& token_a,
                                 const BigUint& token_b, uint32_t t);

/// Public commitment to an authority key: subset-sum hash over the RSA
/// modulus bits.
FieldElement authority_commitment_eval(const ProtocolParams& p, const BigUint& modulus);

} // namespace zkcontact
