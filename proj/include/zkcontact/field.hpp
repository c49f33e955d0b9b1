#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>

#include "zkcontact/biguint.hpp"
#include "zkcontact/bytes.hpp"

namespace zkcontact {

class Field;

/// Element of a prime field, always reduced; carries a pointer to its
/// (interned) field, so equality and arithmetic are only defined between
/// elements of the same field.
class FieldElement {
public:
    /// Null element: placeholder for containers, unusable in arithmetic.
    FieldElement() = default;

    const Field& field() const;
    bool is_zero() const;
    BigUint value() const;
    /// Fixed-width big-endian encoding; width is Field::element_bytes().
    Bytes to_bytes() const;

    FieldElement operator-() const;
    FieldElement inv() const; // throws Error on zero
    FieldElement pow(const BigUint& e) const;

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
    bool operator==(const FieldElement&) const = default;

private:
    friend class Field;
    std::array<uint64_t, 4> mont_{}; // Montgomery form, limbs past the field width stay zero
    const Field* field_ = nullptr;
};

/// A prime field of at most 256 bits. Instances are interned: Field::get
/// returns the same object for the same prime, so FieldElement can compare
/// fields by pointer.
class Field {
public:
    /// Default 254-bit prime used by the protocol.
    static const Field& bn254();
    /// 2^61 - 1, the fast test prime.
    static const Field& mersenne61();
    /// 251, small enough for exhaustive checks.
    static const Field& p251();
    /// Interned field for an arbitrary prime (odd, >= 3, <= 256 bits).
    static const Field& get(const BigUint& prime);

    const BigUint& prime() const { return prime_; }
    size_t bits() const { return bits_; }
    size_t element_bytes() const { return bytes_; }

    FieldElement zero() const;
    FieldElement one() const;
    FieldElement from_u64(uint64_t v) const;
    FieldElement from_biguint(const BigUint& v) const;
    /// Strict decode: exact width and value < prime, else ParseError.
    FieldElement from_bytes(std::span<const uint8_t> bytes) const;
    FieldElement random_element(std::mt19937_64& rng) const;

    Field(const Field&) = delete;
    Field& operator=(const Field&) = delete;

private:
    explicit Field(BigUint prime);
    friend class FieldElement;
    friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b);

    void mont_mul(const uint64_t* a, const uint64_t* b, uint64_t* out) const;
    void mod_add(const uint64_t* a, const uint64_t* b, uint64_t* out) const;
    void mod_sub(const uint64_t* a, const uint64_t* b, uint64_t* out) const;
    bool geq_prime(const uint64_t* a) const;
    FieldElement wrap(const std::array<uint64_t, 4>& mont) const;

    BigUint prime_;
    size_t bits_;
    size_t bytes_;
    size_t k_; // limb count of the prime
    uint64_t neg_inv_; // -prime^{-1} mod 2^64
    std::array<uint64_t, 4> p_{};
    std::array<uint64_t, 4> r2_{};  // R^2 mod p, R = 2^(64k)
    std::array<uint64_t, 4> one_{}; // R mod p
    BigUint inv_exponent_; // p - 2
};

} // namespace zkcontact
