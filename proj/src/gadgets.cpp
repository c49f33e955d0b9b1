#include "zkcontact/gadgets.hpp"

#include "zkcontact/digest.hpp"
#include "zkcontact/errors.hpp"

namespace zkcontact {

namespace {

constexpr std::string_view kDerivationPrefix = "zkcontact/v1/";

LinearCombination var(VarIndex v, const Field& f) { return LinearCombination(v, f.one()); }

BigUint checked_sub(const BigUint& a, const BigUint& b) {
    if (a < b) throw WitnessError("carry chain underflow");
    return a - b;
}

} // namespace

SubsetSumParams SubsetSumParams::derive(const Field& field, std::string_view domain_tag,
                                        size_t input_bits) {
    SubsetSumParams out;
    out.input_bits = input_bits;
    out.domain_tag.assign(domain_tag.begin(), domain_tag.end());
    out.coefficients.reserve(input_bits);
    for (size_t i = 0; i < input_bits; ++i) {
        ByteWriter w;
        w.raw(Bytes(kDerivationPrefix.begin(), kDerivationPrefix.end()));
        w.raw(out.domain_tag);
        w.u32(static_cast<uint32_t>(i));
        Bytes stream = xof_expand(w.data(), field.element_bytes() + 16);
        out.coefficients.push_back(field.from_biguint(BigUint::from_bytes_be(stream)));
    }
    return out;
}

FieldElement subset_sum_eval(const SubsetSumParams& params, const std::vector<bool>& bits) {
    if (bits.size() != params.input_bits) throw Error("subset-sum input arity mismatch");
    if (params.coefficients.empty()) throw Error("subset-sum parameters are empty");
    FieldElement acc = params.coefficients.front().field().zero();
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) acc = acc + params.coefficients[i];
    }
    return acc;
}

BitsGadget::BitsGadget(CircuitBuilder& b, VarIndex x, size_t bits) : x_(x) {
    const Field& f = b.field();
    uint32_t start = b.constraint_count();
    bits_.reserve(bits);
    for (size_t i = 0; i < bits; ++i) bits_.push_back(b.add_aux());

    LinearCombination pack;
    FieldElement coeff = f.one();
    for (VarIndex v : bits_) {
        b.constrain(var(v, f), LinearCombination(v, f.one()).add(0, -f.one()), {});
        pack.add(v, coeff);
        coeff = coeff + coeff;
    }
    b.constrain_eq(std::move(pack), var(x, f));
    handle_ = {{x}, bits_, {start, b.constraint_count()}};
}

void BitsGadget::assign(WitnessBuilder& w) const {
    BigUint v = w.get(x_).value();
    if (v.bit_length() > bits_.size()) throw WitnessError("value exceeds bit width");
    const Field& f = w.field();
    for (size_t i = 0; i < bits_.size(); ++i) {
        w.set(bits_[i], v.bit(i) ? f.one() : f.zero());
    }
}

LeqGadget::LeqGadget(CircuitBuilder& b, VarIndex a, VarIndex bv, size_t bits)
    : a_(a), b_(bv), diff_(b.add_aux()), diff_bits_(b, diff_, bits) {
    const Field& f = b.field();
    b.constrain_eq(LinearCombination(bv, f.one()).add(a, -f.one()), var(diff_, f));
    handle_ = {{a, bv}, {}, {diff_bits_.handle().constraint_span.first, b.constraint_count()}};
}

void LeqGadget::assign(WitnessBuilder& w) const {
    w.set(diff_, w.get(b_) - w.get(a_));
    diff_bits_.assign(w);
}

SubsetSumGadget::SubsetSumGadget(CircuitBuilder& b, const SubsetSumParams& params,
                                 std::vector<VarIndex> bit_vars)
    : bit_vars_(std::move(bit_vars)), digest_(0) {
    if (bit_vars_.size() != params.input_bits) throw Error("subset-sum input arity mismatch");
    digest_ = b.add_aux();
    emit(b, params);
}

SubsetSumGadget::SubsetSumGadget(CircuitBuilder& b, const SubsetSumParams& params,
                                 std::vector<VarIndex> bit_vars, VarIndex digest)
    : bit_vars_(std::move(bit_vars)), digest_(digest) {
    if (bit_vars_.size() != params.input_bits) throw Error("subset-sum input arity mismatch");
    emit(b, params);
}

void SubsetSumGadget::emit(CircuitBuilder& b, const SubsetSumParams& params) {
    coefficients_ = params.coefficients;
    uint32_t start = b.constraint_count();
    LinearCombination dot;
    for (size_t i = 0; i < bit_vars_.size(); ++i) {
        dot.add(bit_vars_[i], coefficients_[i]);
    }
    b.constrain_eq(std::move(dot), var(digest_, b.field()));
    handle_ = {bit_vars_, {digest_}, {start, b.constraint_count()}};
}

void SubsetSumGadget::assign(WitnessBuilder& w) const {
    FieldElement acc = w.field().zero();
    for (size_t i = 0; i < bit_vars_.size(); ++i) {
        acc = acc + coefficients_[i] * w.get(bit_vars_[i]);
    }
    w.set(digest_, acc);
}

CanonicalPairGadget::CanonicalPairGadget(CircuitBuilder& b, VarIndex tA, VarIndex tB,
                                         size_t bits)
    : tA_(tA),
      tB_(tB),
      sel_(b.add_aux()),
      prodA_(b.add_aux()),
      prodB_(b.add_aux()),
      lo_(b.add_aux()),
      hi_(b.add_aux()),
      leq_(b, lo_, hi_, bits) {
    const Field& f = b.field();
    // sel ∈ {0,1}; sel = 1 places tA in lo.
    b.constrain(var(sel_, f), LinearCombination(sel_, f.one()).add(0, -f.one()), {});
    b.constrain(var(sel_, f), var(tA_, f), var(prodA_, f));
    b.constrain(var(sel_, f), var(tB_, f), var(prodB_, f));
    // lo = sel·tA + (1−sel)·tB ; hi = tA + tB − lo.
    b.constrain_eq(LinearCombination(prodA_, f.one()).add(tB_, f.one()).add(prodB_, -f.one()),
                   var(lo_, f));
    b.constrain_eq(LinearCombination(tA_, f.one()).add(tB_, f.one()).add(lo_, -f.one()),
                   var(hi_, f));
    handle_ = {{tA, tB}, {lo_, hi_}, {leq_.handle().constraint_span.first, b.constraint_count()}};
}

void CanonicalPairGadget::assign(WitnessBuilder& w) const {
    const Field& f = w.field();
    FieldElement a = w.get(tA_);
    FieldElement bval = w.get(tB_);
    bool a_low = a.value() <= bval.value();
    FieldElement sel = a_low ? f.one() : f.zero();
    w.set(sel_, sel);
    w.set(prodA_, sel * a);
    w.set(prodB_, sel * bval);
    w.set(lo_, a_low ? a : bval);
    w.set(hi_, a_low ? bval : a);
    leq_.assign(w);
}

TokenSplitGadget::TokenSplitGadget(CircuitBuilder& b, VarIndex digest)
    : digest_(digest),
      token_(b.add_aux()),
      top_(b.add_aux()),
      token_bits_(b.field().bits() - 1),
      token_bits_gadget_(b, token_, token_bits_) {
    const Field& f = b.field();
    b.constrain(var(top_, f), LinearCombination(top_, f.one()).add(0, -f.one()), {});
    b.constrain_eq(LinearCombination(token_, f.one())
                       .add(top_, f.from_biguint(BigUint::pow2(token_bits_))),
                   var(digest_, f));
    handle_ = {{digest},
               {token_, top_},
               {token_bits_gadget_.handle().constraint_span.first, b.constraint_count()}};
}

void TokenSplitGadget::assign(WitnessBuilder& w) const {
    const Field& f = w.field();
    BigUint d = w.get(digest_).value();
    bool top = d.bit(token_bits_); // d < p < 2^(token_bits+1)
    w.set(top_, top ? f.one() : f.zero());
    w.set(token_, f.from_biguint(top ? d - BigUint::pow2(token_bits_) : d));
    token_bits_gadget_.assign(w);
}

BigmulCheckGadget::BigmulCheckGadget(CircuitBuilder& b, const RadixParams& params,
                                     std::vector<VarIndex> x_digits,
                                     std::vector<VarIndex> y_digits,
                                     std::vector<VarIndex> q_digits,
                                     std::vector<VarIndex> rem_digits, const BigUint& modulus)
    : params_(params),
      x_(std::move(x_digits)),
      y_(std::move(y_digits)),
      q_(std::move(q_digits)),
      rem_(std::move(rem_digits)) {
    const size_t n = params_.digits;
    if (x_.size() != n || y_.size() != n || q_.size() != n || rem_.size() != n) {
        throw Error("digit vector arity mismatch");
    }
    const Field& f = b.field();
    uint32_t start = b.constraint_count();
    for (const BigUint& d : radix_digits(modulus, params_)) {
        n_digits_.push_back(f.from_biguint(d));
    }

    products_.resize(n * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < n; ++k) {
            products_[i * n + k] = b.add_aux();
            b.constrain(var(x_[i], f), var(y_[k], f), var(products_[i * n + k], f));
        }
    }

    const size_t out_digits = 2 * n;
    for (size_t j = 0; j < out_digits; ++j) {
        shared_.push_back(b.add_aux());
        range_checks_.emplace_back(b, shared_.back(), params_.radix_bits);
    }
    for (size_t j = 0; j + 1 < out_digits; ++j) {
        carry_lhs_.push_back(b.add_aux());
        carry_rhs_.push_back(b.add_aux());
        range_checks_.emplace_back(b, carry_lhs_.back(), params_.carry_bits());
        range_checks_.emplace_back(b, carry_rhs_.back(), params_.carry_bits());
    }

    // Both sides canonicalize onto the shared digits:
    //   Σ_{i+k=j} term_ik + c_j = shared_j + 2^r · c_{j+1},  c_0 = c_{2n} = 0.
    FieldElement radix = f.from_biguint(BigUint::pow2(params_.radix_bits));
    for (size_t j = 0; j < out_digits; ++j) {
        LinearCombination lhs, rhs;
        for (size_t i = (j >= n ? j - n + 1 : 0); i <= j && i < n; ++i) {
            lhs.add(products_[i * n + (j - i)], f.one());
            rhs.add(q_[i], n_digits_[j - i]);
        }
        if (j < n) rhs.add(rem_[j], f.one());

        LinearCombination lhs_out(shared_[j], f.one());
        LinearCombination rhs_out(shared_[j], f.one());
        if (j > 0) {
            lhs.add(carry_lhs_[j - 1], f.one());
            rhs.add(carry_rhs_[j - 1], f.one());
        }
        if (j + 1 < out_digits) {
            lhs_out.add(carry_lhs_[j], radix);
            rhs_out.add(carry_rhs_[j], radix);
        }
        b.constrain_eq(std::move(lhs), std::move(lhs_out));
        b.constrain_eq(std::move(rhs), std::move(rhs_out));
    }

    handle_.input_vars = x_;
    handle_.input_vars.insert(handle_.input_vars.end(), y_.begin(), y_.end());
    handle_.input_vars.insert(handle_.input_vars.end(), q_.begin(), q_.end());
    handle_.input_vars.insert(handle_.input_vars.end(), rem_.begin(), rem_.end());
    handle_.output_vars = shared_;
    handle_.constraint_span = {start, b.constraint_count()};
}

void BigmulCheckGadget::assign(WitnessBuilder& w) const {
    const Field& f = w.field();
    const size_t n = params_.digits;
    std::vector<BigUint> xv, yv, qv, remv;
    for (size_t i = 0; i < n; ++i) {
        xv.push_back(w.get(x_[i]).value());
        yv.push_back(w.get(y_[i]).value());
        qv.push_back(w.get(q_[i]).value());
        remv.push_back(w.get(rem_[i]).value());
    }
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < n; ++k) {
            w.set(products_[i * n + k], w.get(x_[i]) * w.get(y_[k]));
        }
    }

    BigUint x_int, y_int;
    for (size_t i = n; i-- > 0;) {
        x_int = (x_int << params_.radix_bits) + xv[i];
        y_int = (y_int << params_.radix_bits) + yv[i];
    }
    RadixParams wide{params_.radix_bits, 2 * n, 2 * params_.radix_bits * n};
    std::vector<BigUint> shared = radix_digits(x_int * y_int, wide);
    for (size_t j = 0; j < shared.size(); ++j) {
        w.set(shared_[j], f.from_biguint(shared[j]));
    }

    std::vector<BigUint> n_vals;
    for (const FieldElement& d : n_digits_) n_vals.push_back(d.value());

    BigUint carry_l, carry_r;
    for (size_t j = 0; j + 1 < 2 * n; ++j) {
        BigUint lhs_total = carry_l, rhs_total = carry_r;
        for (size_t i = (j >= n ? j - n + 1 : 0); i <= j && i < n; ++i) {
            lhs_total = lhs_total + xv[i] * yv[j - i];
            rhs_total = rhs_total + qv[i] * n_vals[j - i];
        }
        if (j < n) rhs_total = rhs_total + remv[j];
        carry_l = checked_sub(lhs_total, shared[j]) >> params_.radix_bits;
        carry_r = checked_sub(rhs_total, shared[j]) >> params_.radix_bits;
        w.set(carry_lhs_[j], f.from_biguint(carry_l));
        w.set(carry_rhs_[j], f.from_biguint(carry_r));
    }

    for (const BitsGadget& g : range_checks_) g.assign(w);
}

Rsa3VerifyGadget::Rsa3VerifyGadget(CircuitBuilder& b, VarIndex msg, const BigUint& modulus,
                                   const RadixParams& params)
    : params_(params), modulus_(modulus) {
    if (modulus_.bit_length() > params_.width_bits) throw Error("modulus exceeds radix width");
    const Field& f = b.field();
    uint32_t start = b.constraint_count();
    const size_t n = params_.digits;

    auto alloc_digits = [&](std::vector<VarIndex>& vec) {
        for (size_t i = 0; i < n; ++i) {
            vec.push_back(b.add_aux());
            range_checks_.emplace_back(b, vec.back(), params_.radix_bits);
        }
    };
    alloc_digits(sig_);
    alloc_digits(q1_);
    alloc_digits(r1_);
    alloc_digits(q2_);
    alloc_digits(rep_);

    muls_.emplace_back(b, params_, sig_, sig_, q1_, r1_, modulus_);
    muls_.emplace_back(b, params_, r1_, sig_, q2_, rep_, modulus_);

    // The representative recomposes to the message, modulo the field prime.
    LinearCombination rep_pack;
    FieldElement coeff = f.one();
    FieldElement radix = f.from_biguint(BigUint::pow2(params_.radix_bits));
    for (size_t j = 0; j < n; ++j) {
        rep_pack.add(rep_[j], coeff);
        coeff = coeff * radix;
    }
    b.constrain_eq(std::move(rep_pack), var(msg, f));

    handle_.input_vars = {msg};
    handle_.input_vars.insert(handle_.input_vars.end(), sig_.begin(), sig_.end());
    handle_.constraint_span = {start, b.constraint_count()};
}

void Rsa3VerifyGadget::assign(WitnessBuilder& w) const {
    const Field& f = w.field();
    const size_t n = params_.digits;
    BigUint sig;
    for (size_t i = n; i-- > 0;) {
        sig = (sig << params_.radix_bits) + w.get(sig_[i]).value();
    }
    if (sig >= modulus_) throw WitnessError("signature not reduced mod N");

    auto set_digits = [&](const std::vector<VarIndex>& vars, const BigUint& value) {
        std::vector<BigUint> digits = radix_digits(value, params_);
        for (size_t i = 0; i < n; ++i) w.set(vars[i], f.from_biguint(digits[i]));
    };

    auto [q1, r1] = BigUint::divmod(sig * sig, modulus_);
    set_digits(q1_, q1);
    set_digits(r1_, r1);
    auto [q2, rep] = BigUint::divmod(r1 * sig, modulus_);
    set_digits(q2_, q2);
    set_digits(rep_, rep);

    for (const BitsGadget& g : range_checks_) g.assign(w);
    for (const BigmulCheckGadget& g : muls_) g.assign(w);
}

} // namespace zkcontact
