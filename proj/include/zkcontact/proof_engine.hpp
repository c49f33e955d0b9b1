#pragma once

#include "zkcontact/circuits.hpp"
#include "zkcontact/digest.hpp"

namespace zkcontact {

/// The only backend this build ships. Its proofs are sound and complete but
/// neither succinct nor hiding: the payload is the full witness. Anything
/// that stores or relays proofs under this backend stores witnesses.
inline constexpr std::string_view kDirectWitnessBackend = "direct-witness/v1";

/// Proof payloads never grow beyond this many chained messages.
inline constexpr uint32_t kMaxChainDepth = 64;

struct BackendConfig {
    uint32_t security_parameter = 128; // λ; at least 80
    std::string backend_id = std::string(kDirectWitnessBackend);
};

/// Both keys embed the full circuit description, so verification can re-run
/// the constraint check; circuit_digest is what binds proofs to circuits.
struct KeyPair {
    Bytes proving_key;
    Bytes verifying_key;
    Digest circuit_digest{};
};

struct Proof {
    std::string backend_id;
    std::vector<FieldElement> public_inputs;
    Bytes payload;

    bool operator==(const Proof&) const = default;
};

KeyPair generate_keys(const BackendConfig& cfg, const CircuitSpec& circuit);

/// Emits a proof only for satisfying instances; an unsatisfied witness or a
/// public-input mismatch raises ProveRefused. The prover never emits a proof
/// that will not verify.
Proof prove(const KeyPair& keys, const std::vector<FieldElement>& public_inputs,
            const Assignment& witness);

/// True iff the proof is valid for this key and exactly these public inputs.
/// Malformed keys, payloads or mismatched digests yield false, never a throw.
bool verify(const Bytes& verifying_key, const std::vector<FieldElement>& public_inputs,
            const Proof& proof);

Bytes serialize_proof(const Proof& proof);
Proof parse_proof(const Bytes& data); // throws ParseError

/// One hop of a proof-carrying-data chain: the outgoing message z (equal to
/// the proof's public inputs), tagged with the compliance predicate that
/// produced it and its distance from the seed.
struct PcdMessage {
    CircuitKind predicate{};
    uint32_t depth = 0;
    std::vector<FieldElement> z;
    Proof proof;
};

Bytes serialize_pcd_message(const PcdMessage& msg);
PcdMessage parse_pcd_message(const Bytes& data); // throws ParseError

/// Verifier-side registry: one seed keypair per accepted authority circuit
/// plus the shared extension keypair.
struct PcdPredicateSet {
    std::vector<KeyPair> seed_keys;
    KeyPair extend_key;
};

/// Start a chain with a seed-predicate witness (depth 1).
PcdMessage pcd_seed(const KeyPair& seed_key, const Assignment& witness);

/// Extend a chain by one hop: verifies the predecessor, checks the witness
/// satisfies the extension predicate and that its "pred_digest" slot equals
/// the predecessor's public digest, then emits the new message. Any failed
/// precondition raises ProveRefused.
PcdMessage pcd_extend(const KeyPair& extend_key, const PcdPredicateSet& set,
                      const PcdMessage& predecessor, const Assignment& witness);

/// True iff the whole chain behind msg is compliant with the predicate set.
bool pcd_verify(const PcdPredicateSet& set, const PcdMessage& msg);

/// The chain embedded in msg, seed first, msg last. Throws ParseError on a
/// malformed payload; performs no verification.
std::vector<PcdMessage> pcd_chain(const PcdMessage& msg);

} // namespace zkcontact
