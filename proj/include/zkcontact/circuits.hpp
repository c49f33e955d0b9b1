#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "zkcontact/params.hpp"
#include "zkcontact/rsa.hpp"

namespace zkcontact {

enum class CircuitKind : uint8_t {
    Contact = 1,
    TransitiveStrawman = 2,
    PcdM0 = 3,
    PcdM1 = 4,
    Health = 5,
};

std::string circuit_kind_name(CircuitKind kind);

/// A finished circuit: the constraint system, the ordered names of its public
/// inputs, named witness slots, and the parameters it was built under. This
/// is the unit of serialization; witness generation stays with the builder
/// classes below (a parsed spec can verify but not prove).
struct CircuitSpec {
    CircuitKind kind{};
    ConstraintSystem cs;
    std::vector<std::string> public_layout;
    std::map<std::string, VarIndex> named_witness;
    ProtocolParams params;
};

Bytes serialize_circuit_spec(const CircuitSpec& spec);
CircuitSpec parse_circuit_spec(const Bytes& data); // throws ParseError

/// Ordered list of value-derivation closures; run() executes each leniently,
/// so one failed derivation leaves its variables unset (finalizing to zero)
/// instead of aborting witness generation.
struct AssignPlan {
    std::vector<std::function<void(WitnessBuilder&)>> steps;

    template <typename G, typename... Args>
    std::shared_ptr<G> emit(Args&&... args) {
        auto g = std::make_shared<G>(std::forward<Args>(args)...);
        steps.push_back([g](WitnessBuilder& w) { g->assign(w); });
        return g;
    }
    void push(std::function<void(WitnessBuilder&)> f) { steps.push_back(std::move(f)); }
    void run(WitnessBuilder& w) const;
};

/// Private inputs of the contact statement. token_self is the claimed own
/// token; the circuit re-derives it from (secret, t), so a claim that
/// disagrees yields an unsatisfiable assignment.
struct ContactWitness {
    BigUint secret;
    BigUint token_self;
    BigUint token_other;
    uint32_t t = 0;
    uint32_t t_diag = 0;
    uint64_t status = kStatusPositive;
};

namespace detail {

/// Variable handles of the contact core shared by the baseline circuit and
/// the seed compliance predicate.
struct ContactCore {
    VarIndex secret = 0, t = 0, t_diag = 0, status = 0, token_self = 0, token_other = 0;
};

ContactCore emit_contact_core(CircuitBuilder& b, const ProtocolParams& p, VarIndex h,
                              VarIndex h_s, AssignPlan& plan);

void set_contact_inputs(WitnessBuilder& w, const ContactCore& core, const ContactWitness& wit);

struct TransitiveCore {
    VarIndex secret = 0, t1 = 0, t2 = 0;
    VarIndex token_in = 0, token_out = 0;   // neighbours' tokens, free inputs
    VarIndex token_b1 = 0, token_b2 = 0;    // own tokens, derived in-circuit
};

TransitiveCore emit_transitive_core(CircuitBuilder& b, const ProtocolParams& p, VarIndex h_i,
                                    VarIndex h_j, std::optional<uint32_t> min_gap,
                                    std::optional<uint32_t> max_gap, AssignPlan& plan);

} // namespace detail

/// Baseline contact statement, public inputs (h, h_s):
///   1. h_s = H(S ‖ positive ‖ t_diag)
///   2. token_self derives from (S, t)
///   3. h = H2(sorted token pair ‖ t)
///   4. t_diag ≤ t + W
/// Signature verification stays outside this circuit.
class ContactCircuit {
public:
    explicit ContactCircuit(const ProtocolParams& params);

    const CircuitSpec& spec() const { return spec_; }
    Assignment make_witness(const ContactWitness& wit) const; // never throws

    VarIndex h_var() const { return h_; }
    VarIndex h_s_var() const { return h_s_; }
    const detail::ContactCore& core() const { return core_; }

private:
    CircuitSpec spec_;
    VarIndex h_ = 0, h_s_ = 0;
    detail::ContactCore core_;
    AssignPlan plan_;
};

/// Private inputs of one transitive hop, written from the middle party's
/// view: token_in met them at t1, token_out at t2. token_b1/token_b2 are
/// the claimed own tokens at the two epochs, re-derived in-circuit.
struct TransitiveWitness {
    BigUint secret;
    BigUint token_in;
    BigUint token_b1;
    BigUint token_b2;
    BigUint token_out;
    uint32_t t1 = 0;
    uint32_t t2 = 0;
};

/// Strawman transitive statement, public inputs (h_i, h_j): both contact
/// digests are public, so consecutive hops are linkable by inspection. Binds
/// both own tokens to one secret and enforces t2 ≤ t1 + I.
class TransitiveCircuit {
public:
    explicit TransitiveCircuit(const ProtocolParams& params);

    const CircuitSpec& spec() const { return spec_; }
    Assignment make_witness(const TransitiveWitness& wit) const;

    VarIndex h_i_var() const { return h_i_; }
    VarIndex h_j_var() const { return h_j_; }
    const detail::TransitiveCore& core() const { return core_; }

private:
    CircuitSpec spec_;
    VarIndex h_i_ = 0, h_j_ = 0;
    detail::TransitiveCore core_;
    AssignPlan plan_;
};

struct M0Witness {
    ContactWitness contact;
    BigUint signature; // authority signature over h_s
};

/// Seed compliance predicate, public inputs (h_i, h_s, p_s_commitment): the
/// contact statement plus in-circuit verification of the authority signature
/// over h_s. The authority key is a per-circuit constant; the commitment
/// public input is pinned to its hash, so proofs name the key without
/// revealing which entry of a directory matched.
class PcdM0Circuit {
public:
    PcdM0Circuit(const ProtocolParams& params, const RsaPublicKey& authority);

    const CircuitSpec& spec() const { return spec_; }
    Assignment make_witness(const M0Witness& wit) const;

    const RsaPublicKey& authority() const { return authority_; }
    FieldElement key_commitment() const { return commitment_; }
    VarIndex h_i_var() const { return h_i_; }
    VarIndex h_s_var() const { return h_s_; }
    const detail::ContactCore& core() const { return core_; }

private:
    CircuitSpec spec_;
    RsaPublicKey authority_;
    FieldElement commitment_;
    RadixParams radix_;
    VarIndex h_i_ = 0, h_s_ = 0, commitment_var_ = 0;
    detail::ContactCore core_;
    std::shared_ptr<Rsa3VerifyGadget> rsa_;
    AssignPlan plan_;
};

/// Recursive compliance predicate, public input (h_j) only: the predecessor
/// digest h_i is the named witness slot "pred_digest", checked against the
/// predecessor message by the proof engine rather than published.
class PcdM1Circuit {
public:
    explicit PcdM1Circuit(const ProtocolParams& params);

    const CircuitSpec& spec() const { return spec_; }
    Assignment make_witness(const TransitiveWitness& wit) const;

    VarIndex h_j_var() const { return h_j_; }
    VarIndex pred_digest_var() const { return pred_digest_; }
    const detail::TransitiveCore& core() const { return core_; }

private:
    CircuitSpec spec_;
    VarIndex h_j_ = 0, pred_digest_ = 0;
    detail::TransitiveCore core_;
    AssignPlan plan_;
};

struct HealthWitness {
    BigUint secret;
    uint32_t t_diag = 0; // t′: epoch of the negative test
    uint64_t status = kStatusNegative;
};

/// Proof-of-health statement, public inputs (h_s, t):
///   h_s = H(S ‖ negative ‖ t′) and t ≤ t′ + D for the public epoch t.
class HealthCircuit {
public:
    explicit HealthCircuit(const ProtocolParams& params);

    const CircuitSpec& spec() const { return spec_; }
    Assignment make_witness(const HealthWitness& wit, uint32_t now_epoch) const;

    VarIndex h_s_var() const { return h_s_; }
    VarIndex t_var() const { return t_; }
    VarIndex secret_var() const { return secret_; }
    VarIndex t_diag_var() const { return t_diag_; }
    VarIndex status_var() const { return status_; }

private:
    CircuitSpec spec_;
    VarIndex h_s_ = 0, t_ = 0, secret_ = 0, t_diag_ = 0, status_ = 0;
    AssignPlan plan_;
};

/// Credential-request statement, public inputs (h_s, status, t_diag):
///   h_s = H(S ‖ status ‖ t_diag) for a private S.
/// Shown to a health authority so it can sign h_s for any status code it
/// supports without ever seeing the secret behind the digest.
class CredentialCircuit {
public:
    explicit CredentialCircuit(const ProtocolParams& params);

    const CircuitSpec& spec() const { return spec_; }
    Assignment make_witness(const HealthWitness& wit) const;

    VarIndex h_s_var() const { return h_s_; }

private:
    CircuitSpec spec_;
    VarIndex h_s_ = 0, status_ = 0, t_diag_ = 0, secret_ = 0;
    AssignPlan plan_;
};

} // namespace zkcontact
