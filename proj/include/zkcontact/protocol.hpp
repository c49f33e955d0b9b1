#pragma once

#include <memory>
#include <optional>
#include <span>

#include "zkcontact/proof_engine.hpp"
#include "zkcontact/rsa.hpp"

namespace zkcontact {

struct AuthorityRecord {
    std::string id;
    RsaPublicKey key;
    FieldElement commitment; // subset-sum hash of the modulus bits
};

/// Flat list of health authorities every participant trusts. Record order is
/// part of the deployment: seed-predicate keys are derived per record.
class AuthorityDirectory {
public:
    void add(std::string id, const RsaPublicKey& key, const ProtocolParams& params);
    const std::vector<AuthorityRecord>& records() const { return records_; }
    const AuthorityRecord* find(const FieldElement& commitment) const;

private:
    std::vector<AuthorityRecord> records_;
};

/// Everything all parties derive deterministically from the protocol
/// parameters and the authority directory: circuit instances, proving and
/// verifying keys, and the predicate set for chain verification. Two parties
/// constructing this from the same inputs hold byte-identical keys.
class Deployment {
public:
    explicit Deployment(const ProtocolParams& params, AuthorityDirectory directory,
                        BackendConfig config = {});

    const ProtocolParams& params() const { return params_; }
    const AuthorityDirectory& directory() const { return directory_; }
    const BackendConfig& config() const { return config_; }

    const ContactCircuit& contact_circuit() const { return contact_; }
    const CredentialCircuit& credential_circuit() const { return credential_; }
    const HealthCircuit& health_circuit() const { return health_; }
    const PcdM1Circuit& extension_circuit() const { return m1_; }
    const PcdM0Circuit& seed_circuit(size_t authority_index) const;
    std::optional<size_t> authority_index(const FieldElement& commitment) const;

    const KeyPair& contact_keys() const { return contact_keys_; }
    const KeyPair& credential_keys() const { return credential_keys_; }
    const KeyPair& health_keys() const { return health_keys_; }
    const KeyPair& extension_keys() const { return m1_keys_; }
    const KeyPair& seed_keys(size_t authority_index) const;
    const PcdPredicateSet& predicates() const { return predicates_; }

private:
    ProtocolParams params_;
    AuthorityDirectory directory_;
    BackendConfig config_;
    ContactCircuit contact_;
    CredentialCircuit credential_;
    HealthCircuit health_;
    PcdM1Circuit m1_;
    std::vector<std::unique_ptr<PcdM0Circuit>> m0_;
    KeyPair contact_keys_, credential_keys_, health_keys_, m1_keys_;
    PcdPredicateSet predicates_;
};

struct ContactRecord {
    FieldElement h;
    uint32_t t = 0;
    BigUint token_self;
    BigUint token_other;
};

/// Per-agent protocol state. The secret never appears in anything an agent
/// sends; every outbound artifact is built from digests, tokens and proofs.
class AgentState {
public:
    AgentState(const ProtocolParams& params, BigUint secret);
    static AgentState generate(const ProtocolParams& params, std::mt19937_64& rng);

    const ProtocolParams& params() const { return params_; }
    const BigUint& secret() const { return secret_; }
    uint32_t clock() const { return clock_; }

    /// Monotone clock advance; prunes entries that fall out of the window.
    void advance_clock(uint32_t now);
    BigUint token_at(uint32_t t) const;
    /// Logs the encounter (deduplicated per pair and epoch) and returns the
    /// contact digest both endpoints compute.
    FieldElement record_contact(const BigUint& other_token, uint32_t t);
    /// Removes entries older than the contact window; returns how many.
    size_t prune_contacts(uint32_t now);
    /// Ordered by (epoch, digest); an entry aged exactly the window is kept.
    const std::vector<ContactRecord>& contact_log() const { return log_; }

private:
    ProtocolParams params_;
    BigUint secret_;
    uint32_t clock_ = 0;
    std::vector<ContactRecord> log_;
};

/// What an agent shows an authority: the diagnosis digest plus a proof that
/// it is well-formed for the claimed status and epoch. No secret inside.
struct CredentialRequest {
    FieldElement h_s;
    uint64_t status = 0;
    uint32_t t_diag = 0;
    Proof binding; // public inputs (h_s, status, t_diag)
};

Bytes serialize_credential_request(const CredentialRequest& req);
CredentialRequest parse_credential_request(const Bytes& data);

struct DiagnosisCredential {
    FieldElement h_s;
    BigUint signature;
    uint32_t t_diag = 0;
    uint64_t status = 0;
    FieldElement authority_key_commitment;
};

Bytes serialize_credential(const DiagnosisCredential& cred);
DiagnosisCredential parse_credential(const Bytes& data);

CredentialRequest make_credential_request(const AgentState& state, const Deployment& ctx,
                                          uint64_t status, uint32_t t_diag);

/// Signs diagnosis digests after checking the requester's binding proof and
/// its own status policy. Holds the only private signing key in the system.
class HealthAuthority {
public:
    HealthAuthority(const Deployment& ctx, RsaKeyPair key,
                    std::vector<uint64_t> supported_statuses);

    const RsaPublicKey& public_key() const { return key_.pub; }
    FieldElement key_commitment() const { return commitment_; }
    DiagnosisCredential issue(const CredentialRequest& req) const; // throws Error

private:
    const Deployment* ctx_;
    RsaKeyPair key_;
    std::vector<uint64_t> supported_;
    FieldElement commitment_;
};

/// Baseline published tuple: proof of the contact statement plus the signed
/// diagnosis digest. Public inputs are exactly (h, h_s).
struct ContactBundle {
    Proof proof;
    FieldElement h;
    FieldElement h_s;
    BigUint signature;
};

Bytes serialize_contact_bundle(const ContactBundle& bundle);
ContactBundle parse_contact_bundle(const Bytes& data);

/// Chain extension output: exactly one field element of public data (h_j),
/// so downstream observers cannot link it to the digest it extends.
struct TransitiveBundle {
    PcdMessage message;
};

enum class BundleKind : uint8_t { Contact = 1, Transitive = 2 };

/// A registry entry as a scanner sees it: the kind tag and the opaque body.
struct BundleRecord {
    BundleKind kind{};
    Bytes body;
};

/// One baseline bundle per log entry the contact statement can cover
/// (t_diag ≤ t + W); entries out of range are skipped, not errors.
std::vector<ContactBundle> build_contact_bundles(const AgentState& state, const Deployment& ctx,
                                                 const DiagnosisCredential& cred);

/// Depth-1 chain seeds for the same qualifying entries, carrying the
/// authority-signed diagnosis inside the compliance proof.
std::vector<PcdMessage> build_seed_messages(const AgentState& state, const Deployment& ctx,
                                            const DiagnosisCredential& cred);

/// Extends a matched chain by one hop using a later log entry. Epoch-bound
/// violations surface as ProveRefused from the proof engine.
TransitiveBundle build_transitive_bundle(const AgentState& state, const Deployment& ctx,
                                         const PcdMessage& matched,
                                         const ContactRecord& matched_entry,
                                         const ContactRecord& onward);

struct Match {
    BundleKind kind{};
    uint32_t order = 0; // hop count: 1 = direct contact with the diagnosed
    bool verified = false;
    ContactRecord entry;
    std::optional<PcdMessage> message; // transitive matches carry the chain
};

/// Scans a registry page against the contact log. Each entry is handled
/// independently: malformed bodies are skipped, verification failures are
/// reported as unverified matches, and the scan never aborts.
std::vector<Match> scan_and_match(const AgentState& state, const Deployment& ctx,
                                  std::span<const BundleRecord> page);

} // namespace zkcontact
