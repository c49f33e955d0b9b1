#include "zkcontact/field.hpp"

#include <map>
#include <memory>
#include <mutex>

#include "zkcontact/errors.hpp"

namespace zkcontact {

using u128 = unsigned __int128;

namespace {

BigUint limbs_to_biguint(const uint64_t* limbs, size_t k) {
    ByteWriter w;
    for (size_t i = k; i-- > 0;) w.u64(limbs[i]);
    return BigUint::from_bytes_be(w.data());
}

std::array<uint64_t, 4> biguint_to_limbs(const BigUint& v) {
    std::array<uint64_t, 4> out{};
    for (size_t i = 0; i < v.limb_count(); ++i) out[i] = v.limb(i);
    return out;
}

} // namespace

Field::Field(BigUint prime) : prime_(std::move(prime)) {
    bits_ = prime_.bit_length();
    bytes_ = (bits_ + 7) / 8;
    k_ = prime_.limb_count();
    p_ = biguint_to_limbs(prime_);

    // neg_inv_ = -p^{-1} mod 2^64 by Newton iteration on the low limb.
    uint64_t inv = p_[0]; // correct to 3 bits for odd p
    for (int i = 0; i < 5; ++i) inv *= 2 - p_[0] * inv;
    neg_inv_ = ~inv + 1;

    BigUint r = BigUint::pow2(64 * k_) % prime_;
    one_ = biguint_to_limbs(r);
    r2_ = biguint_to_limbs((r * r) % prime_);
    inv_exponent_ = prime_ - BigUint(2);
}

const Field& Field::get(const BigUint& prime) {
    static std::mutex mu;
    static std::map<BigUint, std::unique_ptr<Field>>* registry =
        new std::map<BigUint, std::unique_ptr<Field>>();
    std::lock_guard lock(mu);
    auto it = registry->find(prime);
    if (it != registry->end()) return *it->second;

    if (prime.bit_length() > 256) throw Error("field prime exceeds 256 bits");
    if (prime < BigUint(3) || !prime.bit(0)) throw Error("field prime must be odd and >= 3");
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    if (!is_probable_prime(prime, rng)) throw Error("field modulus is not prime");

    auto [pos, _] = registry->emplace(prime, std::unique_ptr<Field>(new Field(prime)));
    return *pos->second;
}

const Field& Field::bn254() {
    static const Field& f = get(BigUint::from_decimal(
        "21888242871839275222246405745257275088548364400416034343698204186575808495617"));
    return f;
}

const Field& Field::mersenne61() {
    static const Field& f = get(BigUint((1ULL << 61) - 1));
    return f;
}

const Field& Field::p251() {
    static const Field& f = get(BigUint(251));
    return f;
}

// CIOS Montgomery multiplication: out = a * b * R^{-1} mod p.
void Field::mont_mul(const uint64_t* a, const uint64_t* b, uint64_t* out) const {
    const size_t k = k_;
    uint64_t t[6] = {0};
    for (size_t i = 0; i < k; ++i) {
        u128 carry = 0;
        for (size_t j = 0; j < k; ++j) {
            u128 cur = static_cast<u128>(a[j]) * b[i] + t[j] + carry;
            t[j] = static_cast<uint64_t>(cur);
            carry = cur >> 64;
        }
        u128 s = static_cast<u128>(t[k]) + carry;
        t[k] = static_cast<uint64_t>(s);
        t[k + 1] = static_cast<uint64_t>(s >> 64);

        uint64_t m = t[0] * neg_inv_;
        u128 cur = static_cast<u128>(m) * p_[0] + t[0];
        carry = cur >> 64;
        for (size_t j = 1; j < k; ++j) {
            cur = static_cast<u128>(m) * p_[j] + t[j] + carry;
            t[j - 1] = static_cast<uint64_t>(cur);
            carry = cur >> 64;
        }
        s = static_cast<u128>(t[k]) + carry;
        t[k - 1] = static_cast<uint64_t>(s);
        t[k] = t[k + 1] + static_cast<uint64_t>(s >> 64);
    }

    // Result < 2p: one conditional subtraction.
    if (t[k] != 0 || geq_prime(t)) {
        uint64_t borrow = 0;
        for (size_t j = 0; j < k; ++j) {
            u128 d = static_cast<u128>(t[j]) - p_[j] - borrow;
            out[j] = static_cast<uint64_t>(d);
            borrow = (d >> 64) ? 1 : 0;
        }
    } else {
        for (size_t j = 0; j < k; ++j) out[j] = t[j];
    }
    for (size_t j = k; j < 4; ++j) out[j] = 0;
}

bool Field::geq_prime(const uint64_t* a) const {
    for (size_t i = k_; i-- > 0;) {
        if (a[i] != p_[i]) return a[i] > p_[i];
    }
    return true;
}

void Field::mod_add(const uint64_t* a, const uint64_t* b, uint64_t* out) const {
    uint64_t tmp[4] = {0};
    uint64_t carry = 0;
    for (size_t i = 0; i < k_; ++i) {
        u128 s = static_cast<u128>(a[i]) + b[i] + carry;
        tmp[i] = static_cast<uint64_t>(s);
        carry = static_cast<uint64_t>(s >> 64);
    }
    if (carry || geq_prime(tmp)) {
        uint64_t borrow = 0;
        for (size_t i = 0; i < k_; ++i) {
            u128 d = static_cast<u128>(tmp[i]) - p_[i] - borrow;
            out[i] = static_cast<uint64_t>(d);
            borrow = (d >> 64) ? 1 : 0;
        }
    } else {
        for (size_t i = 0; i < k_; ++i) out[i] = tmp[i];
    }
    for (size_t i = k_; i < 4; ++i) out[i] = 0;
}

void Field::mod_sub(const uint64_t* a, const uint64_t* b, uint64_t* out) const {
    uint64_t borrow = 0;
    for (size_t i = 0; i < k_; ++i) {
        u128 d = static_cast<u128>(a[i]) - b[i] - borrow;
        out[i] = static_cast<uint64_t>(d);
        borrow = (d >> 64) ? 1 : 0;
    }
    if (borrow) {
        uint64_t carry = 0;
        for (size_t i = 0; i < k_; ++i) {
            u128 s = static_cast<u128>(out[i]) + p_[i] + carry;
            out[i] = static_cast<uint64_t>(s);
            carry = static_cast<uint64_t>(s >> 64);
        }
    }
    for (size_t i = k_; i < 4; ++i) out[i] = 0;
}

FieldElement Field::wrap(const std::array<uint64_t, 4>& mont) const {
    FieldElement e;
    e.mont_ = mont;
    e.field_ = this;
    return e;
}

FieldElement Field::zero() const {
    return wrap({});
}

FieldElement Field::one() const {
    return wrap(one_);
}

FieldElement Field::from_biguint(const BigUint& v) const {
    auto limbs = biguint_to_limbs(v % prime_);
    std::array<uint64_t, 4> mont{};
    mont_mul(limbs.data(), r2_.data(), mont.data());
    return wrap(mont);
}

FieldElement Field::from_u64(uint64_t v) const {
    return from_biguint(BigUint(v));
}

FieldElement Field::from_bytes(std::span<const uint8_t> bytes) const {
    if (bytes.size() != bytes_) throw ParseError("field element has wrong byte width");
    BigUint v = BigUint::from_bytes_be(bytes);
    if (v >= prime_) throw ParseError("field element out of range");
    return from_biguint(v);
}

FieldElement Field::random_element(std::mt19937_64& rng) const {
    return from_biguint(BigUint::random_below(rng, prime_));
}

const Field& FieldElement::field() const {
    if (!field_) throw Error("null field element");
    return *field_;
}

bool FieldElement::is_zero() const {
    return mont_ == std::array<uint64_t, 4>{};
}

BigUint FieldElement::value() const {
    const Field& f = field();
    uint64_t unit[4] = {1, 0, 0, 0};
    uint64_t std_limbs[4];
    f.mont_mul(mont_.data(), unit, std_limbs);
    return limbs_to_biguint(std_limbs, f.k_);
}

Bytes FieldElement::to_bytes() const {
    return value().to_bytes_be(field().element_bytes());
}

namespace {

const Field& common_field(const Field* fa, const Field* fb) {
    if (!fa || fa != fb) throw Error("field mismatch");
    return *fa;
}

} // namespace

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    const Field& f = common_field(a.field_, b.field_);
    std::array<uint64_t, 4> out{};
    f.mod_add(a.mont_.data(), b.mont_.data(), out.data());
    return f.wrap(out);
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    const Field& f = common_field(a.field_, b.field_);
    std::array<uint64_t, 4> out{};
    f.mod_sub(a.mont_.data(), b.mont_.data(), out.data());
    return f.wrap(out);
}

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    const Field& f = common_field(a.field_, b.field_);
    std::array<uint64_t, 4> out{};
    f.mont_mul(a.mont_.data(), b.mont_.data(), out.data());
    return f.wrap(out);
}

FieldElement FieldElement::operator-() const {
    return field().zero() - *this;
}

FieldElement FieldElement::pow(const BigUint& e) const {
    const Field& f = field();
    FieldElement result = f.one();
    for (size_t i = e.bit_length(); i-- > 0;) {
        result = result * result;
        if (e.bit(i)) result = result * *this;
    }
    return result;
}

FieldElement FieldElement::inv() const {
    if (is_zero()) throw Error("inversion of zero field element");
    return pow(field().inv_exponent_);
}

} // namespace zkcontact
