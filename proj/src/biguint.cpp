#include "zkcontact/biguint.hpp"

#include <algorithm>
#include <bit>

#include "zkcontact/digest.hpp"
#include "zkcontact/errors.hpp"

namespace zkcontact {

using u128 = unsigned __int128;

void BigUint::normalize() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint BigUint::from_bytes_be(std::span<const uint8_t> bytes) {
    BigUint out;
    out.limbs_.assign((bytes.size() + 7) / 8, 0);
    for (size_t i = 0; i < bytes.size(); ++i) {
        size_t bit = (bytes.size() - 1 - i) * 8;
        out.limbs_[bit / 64] |= static_cast<uint64_t>(bytes[i]) << (bit % 64);
    }
    out.normalize();
    return out;
}

BigUint BigUint::from_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.empty()) throw ParseError("empty hex integer");
    std::string padded = (hex.size() % 2) ? "0" : "";
    padded += hex;
    return from_bytes_be(hex_decode(padded));
}

BigUint BigUint::from_decimal(std::string_view dec) {
    if (dec.empty()) throw ParseError("empty decimal integer");
    BigUint out;
    const BigUint ten(10);
    for (char c : dec) {
        if (c < '0' || c > '9') throw ParseError("invalid decimal digit");
        out = out * ten + BigUint(static_cast<uint64_t>(c - '0'));
    }
    return out;
}

Bytes BigUint::to_bytes_be(size_t width_bytes) const {
    size_t need = std::max<size_t>(1, (bit_length() + 7) / 8);
    if (width_bytes == 0) width_bytes = need;
    if (need > width_bytes) throw Error("integer does not fit requested byte width");
    Bytes out(width_bytes, 0);
    for (size_t i = 0; i < width_bytes; ++i) {
        size_t bit = (width_bytes - 1 - i) * 8;
        if (bit / 64 < limbs_.size()) {
            out[i] = static_cast<uint8_t>(limbs_[bit / 64] >> (bit % 64));
        }
    }
    return out;
}

std::string BigUint::to_hex() const {
    return hex_encode(to_bytes_be());
}

std::string BigUint::to_decimal() const {
    if (is_zero()) return "0";
    std::string out;
    BigUint v = *this;
    const BigUint ten(10);
    while (!v.is_zero()) {
        auto [q, r] = divmod(v, ten);
        out.push_back(static_cast<char>('0' + (r.is_zero() ? 0 : r.limbs_[0])));
        v = std::move(q);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

size_t BigUint::bit_length() const {
    if (limbs_.empty()) return 0;
    return 64 * (limbs_.size() - 1) + (64 - std::countl_zero(limbs_.back()));
}

bool BigUint::bit(size_t i) const {
    size_t limb = i / 64;
    if (limb >= limbs_.size()) return false;
    return (limbs_[limb] >> (i % 64)) & 1;
}

uint64_t BigUint::to_u64() const {
    if (limbs_.size() > 1) throw Error("integer exceeds 64 bits");
    return limbs_.empty() ? 0 : limbs_[0];
}

BigUint operator+(const BigUint& a, const BigUint& b) {
    BigUint out;
    size_t n = std::max(a.limbs_.size(), b.limbs_.size());
    out.limbs_.resize(n + 1, 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < n; ++i) {
        u128 s = static_cast<u128>(a.limb(i)) + b.limb(i) + carry;
        out.limbs_[i] = static_cast<uint64_t>(s);
        carry = static_cast<uint64_t>(s >> 64);
    }
    out.limbs_[n] = carry;
    out.normalize();
    return out;
}

BigUint operator-(const BigUint& a, const BigUint& b) {
    if (a < b) throw Error("BigUint subtraction underflow");
    BigUint out;
    out.limbs_.resize(a.limbs_.size(), 0);
    uint64_t borrow = 0;
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
        u128 d = static_cast<u128>(a.limbs_[i]) - b.limb(i) - borrow;
        out.limbs_[i] = static_cast<uint64_t>(d);
        borrow = (d >> 64) ? 1 : 0;
    }
    out.normalize();
    return out;
}

BigUint operator*(const BigUint& a, const BigUint& b) {
    if (a.is_zero() || b.is_zero()) return BigUint{};
    BigUint out;
    out.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < b.limbs_.size(); ++j) {
            u128 cur = static_cast<u128>(a.limbs_[i]) * b.limbs_[j] + out.limbs_[i + j] + carry;
            out.limbs_[i + j] = static_cast<uint64_t>(cur);
            carry = static_cast<uint64_t>(cur >> 64);
        }
        out.limbs_[i + b.limbs_.size()] += carry;
    }
    out.normalize();
    return out;
}

BigUint operator<<(const BigUint& a, size_t bits) {
    if (a.is_zero()) return a;
    size_t limb_shift = bits / 64, bit_shift = bits % 64;
    BigUint out;
    out.limbs_.assign(a.limbs_.size() + limb_shift + 1, 0);
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
        out.limbs_[i + limb_shift] |= a.limbs_[i] << bit_shift;
        if (bit_shift != 0) {
            out.limbs_[i + limb_shift + 1] |= a.limbs_[i] >> (64 - bit_shift);
        }
    }
    out.normalize();
    return out;
}

BigUint operator>>(const BigUint& a, size_t bits) {
    size_t limb_shift = bits / 64, bit_shift = bits % 64;
    if (limb_shift >= a.limbs_.size()) return BigUint{};
    BigUint out;
    out.limbs_.assign(a.limbs_.size() - limb_shift, 0);
    for (size_t i = 0; i < out.limbs_.size(); ++i) {
        out.limbs_[i] = a.limbs_[i + limb_shift] >> bit_shift;
        if (bit_shift != 0 && i + limb_shift + 1 < a.limbs_.size()) {
            out.limbs_[i] |= a.limbs_[i + limb_shift + 1] << (64 - bit_shift);
        }
    }
    out.normalize();
    return out;
}

std::strong_ordering BigUint::operator<=>(const BigUint& other) const {
    if (limbs_.size() != other.limbs_.size()) {
        return limbs_.size() <=> other.limbs_.size();
    }
    for (size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != other.limbs_[i]) return limbs_[i] <=> other.limbs_[i];
    }
    return std::strong_ordering::equal;
}

// Knuth algorithm D.
std::pair<BigUint, BigUint> BigUint::divmod(const BigUint& a, const BigUint& b) {
    if (b.is_zero()) throw Error("division by zero");
    if (a < b) return {BigUint{}, a};
    if (b.limbs_.size() == 1) {
        uint64_t d = b.limbs_[0];
        BigUint q;
        q.limbs_.resize(a.limbs_.size());
        uint64_t rem = 0;
        for (size_t i = a.limbs_.size(); i-- > 0;) {
            u128 cur = (static_cast<u128>(rem) << 64) | a.limbs_[i];
            q.limbs_[i] = static_cast<uint64_t>(cur / d);
            rem = static_cast<uint64_t>(cur % d);
        }
        q.normalize();
        return {std::move(q), BigUint(rem)};
    }

    const size_t n = b.limbs_.size();
    const size_t m = a.limbs_.size() - n;
    const unsigned shift = static_cast<unsigned>(std::countl_zero(b.limbs_.back()));

    // Normalized copies: u has one extra high limb.
    std::vector<uint64_t> u(a.limbs_.size() + 1, 0);
    std::vector<uint64_t> v(n, 0);
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
        u[i] |= a.limbs_[i] << shift;
        if (shift != 0 && i + 1 <= a.limbs_.size()) {
            u[i + 1] |= a.limbs_[i] >> (64 - shift);
        }
    }
    for (size_t i = n; i-- > 0;) {
        v[i] = b.limbs_[i] << shift;
        if (shift != 0 && i > 0) {
            v[i] |= b.limbs_[i - 1] >> (64 - shift);
        }
    }

    BigUint q;
    q.limbs_.assign(m + 1, 0);
    for (size_t j = m + 1; j-- > 0;) {
        u128 num = (static_cast<u128>(u[j + n]) << 64) | u[j + n - 1];
        u128 qhat = num / v[n - 1];
        u128 rhat = num % v[n - 1];
        while (qhat >= (static_cast<u128>(1) << 64) ||
               qhat * v[n - 2] > ((rhat << 64) | u[j + n - 2])) {
            --qhat;
            rhat += v[n - 1];
            if (rhat >= (static_cast<u128>(1) << 64)) break;
        }

        // u[j..j+n] -= qhat * v
        u128 borrow = 0, carry = 0;
        for (size_t i = 0; i < n; ++i) {
            u128 prod = qhat * v[i] + carry;
            carry = prod >> 64;
            uint64_t lo = static_cast<uint64_t>(prod);
            u128 diff = static_cast<u128>(u[j + i]) - lo - borrow;
            u[j + i] = static_cast<uint64_t>(diff);
            borrow = (diff >> 64) ? 1 : 0;
        }
        u128 diff = static_cast<u128>(u[j + n]) - carry - borrow;
        u[j + n] = static_cast<uint64_t>(diff);

        if (diff >> 64) { // qhat was one too large: add v back
            --qhat;
            uint64_t c = 0;
            for (size_t i = 0; i < n; ++i) {
                u128 s = static_cast<u128>(u[j + i]) + v[i] + c;
                u[j + i] = static_cast<uint64_t>(s);
                c = static_cast<uint64_t>(s >> 64);
            }
            u[j + n] += c;
        }
        q.limbs_[j] = static_cast<uint64_t>(qhat);
    }
    q.normalize();

    BigUint r;
    r.limbs_.assign(u.begin(), u.begin() + n);
    r.normalize();
    if (shift != 0) r = r >> shift;
    return {std::move(q), std::move(r)};
}

BigUint BigUint::pow2(size_t bits) {
    BigUint out;
    out.limbs_.assign(bits / 64 + 1, 0);
    out.limbs_[bits / 64] = 1ULL << (bits % 64);
    return out;
}

BigUint BigUint::modpow(const BigUint& base, const BigUint& exp, const BigUint& mod) {
    if (mod.is_zero()) throw Error("modpow with zero modulus");
    if (mod == BigUint(1)) return BigUint{};
    BigUint result(1);
    BigUint b = base % mod;
    size_t nbits = exp.bit_length();
    for (size_t i = nbits; i-- > 0;) {
        result = (result * result) % mod;
        if (exp.bit(i)) result = (result * b) % mod;
    }
    return result;
}

BigUint BigUint::gcd(BigUint a, BigUint b) {
    while (!b.is_zero()) {
        BigUint r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

BigUint BigUint::modinv(const BigUint& a, const BigUint& m) {
    // Iterative extended Euclid; coefficients tracked with explicit signs.
    if (m.is_zero()) throw Error("modinv with zero modulus");
    BigUint r0 = m, r1 = a % m;
    BigUint t0, t1(1);
    bool neg0 = false, neg1 = false;
    while (!r1.is_zero()) {
        auto [q, r2] = divmod(r0, r1);
        // t2 = t0 - q * t1  (signed)
        BigUint qt = q * t1;
        BigUint t2;
        bool neg2;
        if (neg0 == neg1) {
            if (t0 >= qt) {
                t2 = t0 - qt;
                neg2 = neg0;
            } else {
                t2 = qt - t0;
                neg2 = !neg0;
            }
        } else {
            t2 = t0 + qt;
            neg2 = neg0;
        }
        r0 = std::move(r1);
        r1 = std::move(r2);
        t0 = std::move(t1);
        neg0 = neg1;
        t1 = std::move(t2);
        neg1 = neg2;
    }
    if (r0 != BigUint(1)) throw Error("modinv: arguments not coprime");
    if (neg0) return m - (t0 % m);
    return t0 % m;
}

BigUint BigUint::random_bits(std::mt19937_64& rng, size_t bits) {
    BigUint out;
    if (bits == 0) return out;
    out.limbs_.resize((bits + 63) / 64);
    for (auto& l : out.limbs_) l = rng();
    size_t top = bits % 64;
    if (top != 0) out.limbs_.back() &= (~0ULL) >> (64 - top);
    out.normalize();
    return out;
}

BigUint BigUint::random_below(std::mt19937_64& rng, const BigUint& bound) {
    if (bound.is_zero()) throw Error("random_below with zero bound");
    size_t bits = bound.bit_length();
    for (;;) {
        BigUint candidate = random_bits(rng, bits);
        if (candidate < bound) return candidate;
    }
}

bool is_probable_prime(const BigUint& n, std::mt19937_64& rng, int rounds) {
    static const uint64_t small_primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                            41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    if (n < BigUint(2)) return false;
    for (uint64_t p : small_primes) {
        BigUint bp(p);
        if (n == bp) return true;
        if ((n % bp).is_zero()) return false;
    }
    // n - 1 = d * 2^s
    BigUint n1 = n - BigUint(1);
    BigUint d = n1;
    size_t s = 0;
    while (!d.bit(0)) {
        d = d >> 1;
        ++s;
    }
    for (int round = 0; round < rounds; ++round) {
        BigUint a = BigUint(2) + BigUint::random_below(rng, n - BigUint(4));
        BigUint x = BigUint::modpow(a, d, n);
        if (x == BigUint(1) || x == n1) continue;
        bool composite = true;
        for (size_t i = 1; i < s; ++i) {
            x = (x * x) % n;
            if (x == n1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

} // namespace zkcontact
