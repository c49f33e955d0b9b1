#include "zkcontact/params.hpp"

#include "zkcontact/errors.hpp"

namespace zkcontact {

namespace {

constexpr uint32_t kSecondsPerDay = 86400;

void append_bits(std::vector<bool>& out, const std::vector<bool>& piece) {
    out.insert(out.end(), piece.begin(), piece.end());
}

} // namespace

ProtocolParams ProtocolParams::make(const Field& field, uint32_t rsa_modulus_bits,
                                    uint32_t epoch_seconds) {
    if (epoch_seconds == 0 || kSecondsPerDay % epoch_seconds != 0) {
        throw Error("epoch length must divide a day");
    }
    ProtocolParams p;
    p.field = &field;
    p.epoch_seconds = epoch_seconds;
    const uint32_t epochs_per_day = kSecondsPerDay / epoch_seconds;
    p.contact_window_epochs = 14 * epochs_per_day;
    p.incubation_epochs = 3 * epochs_per_day;
    p.health_window_epochs = 1 * epochs_per_day;
    p.rsa_modulus_bits = rsa_modulus_bits;

    p.diag_hash = SubsetSumParams::derive(field, "diag",
                                          p.secret_bits() + kStatusBits + kEpochBits);
    p.token_hash = SubsetSumParams::derive(field, "token", p.secret_bits() + kEpochBits);
    p.contact_hash = SubsetSumParams::derive(field, "contact",
                                             2 * p.token_bits() + kEpochBits);
    p.authority_hash = SubsetSumParams::derive(field, "authority", rsa_modulus_bits);
    p.validate();
    return p;
}

void ProtocolParams::validate() const {
    if (field == nullptr) throw Error("protocol parameters carry no field");
    if (epoch_seconds == 0) throw Error("epoch length must be positive");
    if (contact_window_epochs == 0 || incubation_epochs == 0 || health_window_epochs == 0) {
        throw Error("protocol windows must be positive");
    }
    // Signed values live strictly below the modulus: h_s < p ≤ 2^bits < N.
    if (rsa_modulus_bits < field->bits() + 2) {
        throw Error("RSA modulus width too narrow for the field");
    }
    if (rsa_modulus_bits % 2 != 0) throw Error("RSA modulus width must be even");
    if (diag_hash.input_bits != secret_bits() + kStatusBits + kEpochBits ||
        token_hash.input_bits != secret_bits() + kEpochBits ||
        contact_hash.input_bits != 2 * token_bits() + kEpochBits ||
        authority_hash.input_bits != rsa_modulus_bits) {
        throw Error("hash instance arity disagrees with parameter widths");
    }
}

std::vector<bool> value_bits_le(const BigUint& v, size_t width) {
    if (v.bit_length() > width) throw Error("value exceeds declared bit width");
    std::vector<bool> out(width);
    for (size_t i = 0; i < width; ++i) out[i] = v.bit(i);
    return out;
}

FieldElement diag_digest_eval(const ProtocolParams& p, const BigUint& secret, uint64_t status,
                              uint32_t t_diag) {
    std::vector<bool> bits = value_bits_le(secret, p.secret_bits());
    append_bits(bits, value_bits_le(BigUint(status), kStatusBits));
    append_bits(bits, value_bits_le(BigUint(t_diag), kEpochBits));
    return subset_sum_eval(p.diag_hash, bits);
}

FieldElement token_digest_eval(const ProtocolParams& p, const BigUint& secret, uint32_t t) {
    std::vector<bool> bits = value_bits_le(secret, p.secret_bits());
    append_bits(bits, value_bits_le(BigUint(t), kEpochBits));
    return subset_sum_eval(p.token_hash, bits);
}

BigUint derive_token(const ProtocolParams& p, const BigUint& secret, uint32_t t) {
    return token_digest_eval(p, secret, t).value() % BigUint::pow2(p.token_bits());
}

FieldElement contact_digest_eval(const ProtocolParams& p, const BigUint& token_a,
                                 const BigUint& token_b, uint32_t t) {
    const BigUint& lo = (token_a <= token_b) ? token_a : token_b;
    const BigUint& hi = (token_a <= token_b) ? token_b : token_a;
    std::vector<bool> bits = value_bits_le(lo, p.token_bits());
    append_bits(bits, value_bits_le(hi, p.token_bits()));
    append_bits(bits, value_bits_le(BigUint(t), kEpochBits));
    return subset_sum_eval(p.contact_hash, bits);
}

FieldElement authority_commitment_eval(const ProtocolParams& p, const BigUint& modulus) {
    return subset_sum_eval(p.authority_hash, value_bits_le(modulus, p.rsa_modulus_bits));
}

} // namespace zkcontact
