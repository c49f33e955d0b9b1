#pragma once

#include <string_view>
#include <vector>

#include "zkcontact/builder.hpp"
#include "zkcontact/radix.hpp"

namespace zkcontact {

/// Parameters of one subset-sum hash instance: digest = Σ a_i·b_i over input
/// bits. Distinct domain tags give independent coefficient vectors, i.e.
/// distinct hash functions, from one derivation rule.
struct SubsetSumParams {
    size_t input_bits = 0;
    std::vector<FieldElement> coefficients;
    Bytes domain_tag;

    /// a_i = XOF("zkcontact/v1/" ‖ domain_tag ‖ be32(i)) reduced mod p; the
    /// expansion reads element_bytes + 16 bytes so the reduction bias is
    /// negligible.
    static SubsetSumParams derive(const Field& field, std::string_view domain_tag,
                                  size_t input_bits);

    bool operator==(const SubsetSumParams&) const = default;
};

/// Out-of-circuit evaluator: the dot product Σ a_i·b_i.
FieldElement subset_sum_eval(const SubsetSumParams& params, const std::vector<bool>& bits);

/// Bit decomposition of x into L booleans: L booleanity constraints plus one
/// packing constraint Σ b_i·2^i = x.
class BitsGadget {
public:
    BitsGadget(CircuitBuilder& b, VarIndex x, size_t bits);

    VarIndex input() const { return x_; }
    const std::vector<VarIndex>& bits() const { return bits_; }
    const GadgetHandle& handle() const { return handle_; }

    /// Throws WitnessError when the assigned value of x needs more than L bits.
    void assign(WitnessBuilder& w) const;

private:
    VarIndex x_;
    std::vector<VarIndex> bits_;
    GadgetHandle handle_;
};

/// a ≤ b for L-bit values, by decomposing (b − a) into L bits.
class LeqGadget {
public:
    LeqGadget(CircuitBuilder& b, VarIndex a, VarIndex bv, size_t bits);

    const GadgetHandle& handle() const { return handle_; }

    void assign(WitnessBuilder& w) const;

private:
    VarIndex a_, b_, diff_;
    BitsGadget diff_bits_;
    GadgetHandle handle_;
};

/// Digest variable constrained to Σ a_i·bit_i. The one-constraint form of the
/// subset-sum hash; inputs must already be boolean variables.
class SubsetSumGadget {
public:
    /// Allocates a fresh digest variable.
    SubsetSumGadget(CircuitBuilder& b, const SubsetSumParams& params,
                    std::vector<VarIndex> bit_vars);
    /// Constrains an existing variable (e.g. a public input) to the digest.
    SubsetSumGadget(CircuitBuilder& b, const SubsetSumParams& params,
                    std::vector<VarIndex> bit_vars, VarIndex digest);

    VarIndex digest() const { return digest_; }
    const GadgetHandle& handle() const { return handle_; }

    void assign(WitnessBuilder& w) const;

private:
    void emit(CircuitBuilder& b, const SubsetSumParams& params);

    std::vector<VarIndex> bit_vars_;
    std::vector<FieldElement> coefficients_;
    VarIndex digest_;
    GadgetHandle handle_;
};

/// (lo, hi) = sorted (tA, tB) via a boolean selector plus lo ≤ hi; both input
/// orders of the same pair yield identical outputs.
class CanonicalPairGadget {
public:
    CanonicalPairGadget(CircuitBuilder& b, VarIndex tA, VarIndex tB, size_t bits);

    VarIndex lo() const { return lo_; }
    VarIndex hi() const { return hi_; }
    const GadgetHandle& handle() const { return handle_; }

    void assign(WitnessBuilder& w) const;

private:
    VarIndex tA_, tB_, sel_, prodA_, prodB_, lo_, hi_;
    LeqGadget leq_;
    GadgetHandle handle_;
};

/// Splits a hash digest d into the protocol token (its low field_bits−1 bits)
/// and one boolean top bit: d = token + 2^(field_bits−1)·top.
class TokenSplitGadget {
public:
    TokenSplitGadget(CircuitBuilder& b, VarIndex digest);

    VarIndex token() const { return token_; }
    const GadgetHandle& handle() const { return handle_; }

    void assign(WitnessBuilder& w) const;

private:
    VarIndex digest_, token_, top_;
    size_t token_bits_;
    BitsGadget token_bits_gadget_;
    GadgetHandle handle_;
};

/// One nondeterministic-quotient multiplication check over digit vectors:
/// x·y = q·N + rem as integers, with N a circuit constant. Both sides are
/// canonicalized onto one shared digit vector through range-checked carry
/// chains, so coefficient arithmetic never wraps the field.
class BigmulCheckGadget {
public:
    BigmulCheckGadget(CircuitBuilder& b, const RadixParams& params,
                      std::vector<VarIndex> x_digits, std::vector<VarIndex> y_digits,
                      std::vector<VarIndex> q_digits, std::vector<VarIndex> rem_digits,
                      const BigUint& modulus);

    const GadgetHandle& handle() const { return handle_; }

    /// Requires x/y/q/rem digit variables to be assigned already.
    void assign(WitnessBuilder& w) const;

private:
    RadixParams params_;
    std::vector<VarIndex> x_, y_, q_, rem_;
    std::vector<FieldElement> n_digits_;
    std::vector<VarIndex> products_;     // p[i*n+k] = x_i · y_k
    std::vector<VarIndex> shared_;       // canonical digits of the product
    std::vector<VarIndex> carry_lhs_;    // chain carries c_1..c_{2n-1}
    std::vector<VarIndex> carry_rhs_;
    std::vector<BitsGadget> range_checks_;
    GadgetHandle handle_;
};

/// sig³ ≡ msg (mod N) for a fixed modulus N: two chained multiplication
/// checks (sig·sig = q₁·N + r₁, then r₁·sig = q₂·N + rep) plus the binding
/// Σ rep_j·2^(r·j) = msg. All digit vectors are range-checked. The binding is
/// modulo the field prime, and sig is range-checked to the digit capacity
/// rather than to N — both relaxations are inherent to the representative
/// encoding and documented in the repository.
class Rsa3VerifyGadget {
public:
    Rsa3VerifyGadget(CircuitBuilder& b, VarIndex msg, const BigUint& modulus,
                     const RadixParams& params);

    const std::vector<VarIndex>& sig_digits() const { return sig_; }
    const RadixParams& params() const { return params_; }
    const GadgetHandle& handle() const { return handle_; }

    /// Requires the sig digit variables to be assigned; derives quotients,
    /// remainders and every chain value from them.
    void assign(WitnessBuilder& w) const;

private:
    RadixParams params_;
    BigUint modulus_;
    std::vector<VarIndex> sig_, q1_, r1_, q2_, rep_;
    std::vector<BitsGadget> range_checks_;
    std::vector<BigmulCheckGadget> muls_;
    GadgetHandle handle_;
};

} // namespace zkcontact
