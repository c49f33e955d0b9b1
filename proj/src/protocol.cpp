#include "zkcontact/protocol.hpp"

#include <algorithm>
#include <map>

#include "zkcontact/bytes.hpp"

namespace zkcontact {

namespace {

uint64_t element_u64(const FieldElement& e, uint64_t max, const char* what) {
    BigUint v = e.value();
    if (v.bit_length() > 64 || v.to_u64() > max) {
        throw ParseError(std::string(what) + " out of range");
    }
    return v.to_u64();
}

void write_element(ByteWriter& w, const FieldElement& e) { w.raw(e.to_bytes()); }

FieldElement read_element(ByteReader& r, const Field& f) {
    return f.from_bytes(r.raw(f.element_bytes()));
}

void write_field_header(ByteWriter& w, const Field& f) {
    Bytes prime = f.prime().to_bytes_be(f.element_bytes());
    w.u8(static_cast<uint8_t>(prime.size()));
    w.raw(prime);
}

const Field& read_field_header(ByteReader& r) {
    return Field::get(BigUint::from_bytes_be(r.raw(r.u8())));
}

} // namespace

void AuthorityDirectory::add(std::string id, const RsaPublicKey& key,
                             const ProtocolParams& params) {
    FieldElement commitment = authority_commitment_eval(params, key.n);
    for (const AuthorityRecord& rec : records_) {
        if (rec.id == id) throw Error("duplicate authority id: " + id);
        if (rec.commitment == commitment) throw Error("duplicate authority key");
    }
    records_.push_back({std::move(id), key, commitment});
}

const AuthorityRecord* AuthorityDirectory::find(const FieldElement& commitment) const {
    for (const AuthorityRecord& rec : records_) {
        if (rec.commitment == commitment) return &rec;
    }
    return nullptr;
}

Deployment::Deployment(const ProtocolParams& params, AuthorityDirectory directory,
                       BackendConfig config)
    : params_(params),
      directory_(std::move(directory)),
      config_(std::move(config)),
      contact_(params_),
      credential_(params_),
      health_(params_),
      m1_(params_) {
    contact_keys_ = generate_keys(config_, contact_.spec());
    credential_keys_ = generate_keys(config_, credential_.spec());
    health_keys_ = generate_keys(config_, health_.spec());
    m1_keys_ = generate_keys(config_, m1_.spec());
    for (const AuthorityRecord& rec : directory_.records()) {
        m0_.push_back(std::make_unique<PcdM0Circuit>(params_, rec.key));
        predicates_.seed_keys.push_back(generate_keys(config_, m0_.back()->spec()));
    }
    predicates_.extend_key = m1_keys_;
}

const PcdM0Circuit& Deployment::seed_circuit(size_t authority_index) const {
    return *m0_.at(authority_index);
}

const KeyPair& Deployment::seed_keys(size_t authority_index) const {
    return predicates_.seed_keys.at(authority_index);
}

std::optional<size_t> Deployment::authority_index(const FieldElement& commitment) const {
    const auto& records = directory_.records();
    for (size_t i = 0; i < records.size(); ++i) {
        if (records[i].commitment == commitment) return i;
    }
    return std::nullopt;
}

AgentState::AgentState(const ProtocolParams& params, BigUint secret)
    : params_(params), secret_(std::move(secret)) {
    params_.validate();
    if (secret_.bit_length() > params_.secret_bits()) {
        throw Error("agent secret exceeds the secret width");
    }
}

AgentState AgentState::generate(const ProtocolParams& params, std::mt19937_64& rng) {
    return AgentState(params, BigUint::random_bits(rng, params.secret_bits()));
}

void AgentState::advance_clock(uint32_t now) {
    if (now < clock_) throw Error("agent clock moved backwards");
    clock_ = now;
    prune_contacts(now);
}

BigUint AgentState::token_at(uint32_t t) const { return derive_token(params_, secret_, t); }

FieldElement AgentState::record_contact(const BigUint& other_token, uint32_t t) {
    BigUint own = token_at(t);
    ContactRecord rec{contact_digest_eval(params_, own, other_token, t), t, std::move(own),
                      other_token};
    auto pos = std::lower_bound(log_.begin(), log_.end(), rec,
                                [](const ContactRecord& a, const ContactRecord& b) {
                                    if (a.t != b.t) return a.t < b.t;
                                    return a.h.to_bytes() < b.h.to_bytes();
                                });
    FieldElement h = rec.h;
    if (pos == log_.end() || !(pos->h == rec.h) || pos->t != rec.t) {
        log_.insert(pos, std::move(rec));
    }
    return h;
}

size_t AgentState::prune_contacts(uint32_t now) {
    size_t before = log_.size();
    std::erase_if(log_, [&](const ContactRecord& rec) {
        return uint64_t(rec.t) + params_.contact_window_epochs < now;
    });
    return before - log_.size();
}

Bytes serialize_credential_request(const CredentialRequest& req) {
    ByteWriter w;
    w.raw(Bytes{'Z', 'K', 'R', 'Q'});
    w.u16(1);
    w.bytes32(serialize_proof(req.binding));
    return w.take();
}

CredentialRequest parse_credential_request(const Bytes& data) {
    ByteReader r(data);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), reinterpret_cast<const uint8_t*>("ZKRQ"))) {
        throw ParseError("bad credential-request magic");
    }
    if (r.u16() != 1) throw ParseError("unsupported credential-request version");
    CredentialRequest req;
    req.binding = parse_proof(r.bytes32());
    r.expect_end();
    if (req.binding.public_inputs.size() != 3) {
        throw ParseError("credential request needs (h_s, status, t_diag)");
    }
    req.h_s = req.binding.public_inputs[0];
    req.status = element_u64(req.binding.public_inputs[1], (uint64_t(1) << kStatusBits) - 1,
                             "status code");
    req.t_diag = static_cast<uint32_t>(
        element_u64(req.binding.public_inputs[2], 0xffffffffull, "diagnosis epoch"));
    return req;
}

Bytes serialize_credential(const DiagnosisCredential& cred) {
    ByteWriter w;
    w.raw(Bytes{'Z', 'K', 'D', 'C'});
    w.u16(1);
    write_field_header(w, cred.h_s.field());
    write_element(w, cred.h_s);
    w.bytes32(cred.signature.to_bytes_be());
    w.u32(cred.t_diag);
    w.u8(static_cast<uint8_t>(cred.status));
    write_element(w, cred.authority_key_commitment);
    return w.take();
}

DiagnosisCredential parse_credential(const Bytes& data) {
    ByteReader r(data);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), reinterpret_cast<const uint8_t*>("ZKDC"))) {
        throw ParseError("bad credential magic");
    }
    if (r.u16() != 1) throw ParseError("unsupported credential version");
    const Field& f = read_field_header(r);
    DiagnosisCredential cred;
    cred.h_s = read_element(r, f);
    cred.signature = BigUint::from_bytes_be(r.bytes32());
    cred.t_diag = r.u32();
    cred.status = r.u8();
    cred.authority_key_commitment = read_element(r, f);
    r.expect_end();
    return cred;
}

CredentialRequest make_credential_request(const AgentState& state, const Deployment& ctx,
                                          uint64_t status, uint32_t t_diag) {
    HealthWitness wit;
    wit.secret = state.secret();
    wit.status = status;
    wit.t_diag = t_diag;
    Assignment w = ctx.credential_circuit().make_witness(wit);
    CredentialRequest req;
    req.h_s = w.public_inputs[0];
    req.status = status;
    req.t_diag = t_diag;
    req.binding = prove(ctx.credential_keys(), w.public_inputs, w);
    return req;
}

HealthAuthority::HealthAuthority(const Deployment& ctx, RsaKeyPair key,
                                 std::vector<uint64_t> supported_statuses)
    : ctx_(&ctx),
      key_(std::move(key)),
      supported_(std::move(supported_statuses)),
      commitment_(authority_commitment_eval(ctx.params(), key_.pub.n)) {}

DiagnosisCredential HealthAuthority::issue(const CredentialRequest& req) const {
    if (std::find(supported_.begin(), supported_.end(), req.status) == supported_.end()) {
        throw Error("authority does not support status code " + std::to_string(req.status));
    }
    const Field& f = *ctx_->params().field;
    std::vector<FieldElement> publics{req.h_s, f.from_u64(req.status), f.from_u64(req.t_diag)};
    if (!verify(ctx_->credential_keys().verifying_key, publics, req.binding)) {
        throw Error("credential request binding proof does not verify");
    }
    DiagnosisCredential cred;
    cred.h_s = req.h_s;
    cred.signature = rsa_sign(key_, req.h_s.value());
    cred.t_diag = req.t_diag;
    cred.status = req.status;
    cred.authority_key_commitment = commitment_;
    return cred;
}

Bytes serialize_contact_bundle(const ContactBundle& bundle) {
    ByteWriter w;
    w.raw(Bytes{'Z', 'K', 'C', 'B'});
    w.u16(1);
    w.bytes32(serialize_proof(bundle.proof));
    w.bytes32(bundle.signature.to_bytes_be());
    return w.take();
}

ContactBundle parse_contact_bundle(const Bytes& data) {
    ByteReader r(data);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), reinterpret_cast<const uint8_t*>("ZKCB"))) {
        throw ParseError("bad contact-bundle magic");
    }
    if (r.u16() != 1) throw ParseError("unsupported contact-bundle version");
    ContactBundle bundle;
    bundle.proof = parse_proof(r.bytes32());
    bundle.signature = BigUint::from_bytes_be(r.bytes32());
    r.expect_end();
    if (bundle.proof.public_inputs.size() != 2) {
        throw ParseError("contact bundle needs public inputs (h, h_s)");
    }
    bundle.h = bundle.proof.public_inputs[0];
    bundle.h_s = bundle.proof.public_inputs[1];
    return bundle;
}

namespace {

/// Entries the contact statement can cover for this diagnosis epoch.
bool within_window(const ProtocolParams& p, uint32_t t_diag, uint32_t t) {
    return t_diag <= uint64_t(t) + p.contact_window_epochs;
}

ContactWitness entry_witness(const AgentState& state, const DiagnosisCredential& cred,
                             const ContactRecord& entry) {
    ContactWitness wit;
    wit.secret = state.secret();
    wit.token_self = entry.token_self;
    wit.token_other = entry.token_other;
    wit.t = entry.t;
    wit.t_diag = cred.t_diag;
    wit.status = cred.status;
    return wit;
}

void require_positive_credential(const AgentState& state, const DiagnosisCredential& cred) {
    if (cred.status != kStatusPositive) {
        throw Error("contact bundles require a positive diagnosis credential");
    }
    FieldElement expect =
        diag_digest_eval(state.params(), state.secret(), cred.status, cred.t_diag);
    if (!(expect == cred.h_s)) {
        throw Error("credential does not bind this agent's secret");
    }
}

} // namespace

std::vector<ContactBundle> build_contact_bundles(const AgentState& state, const Deployment& ctx,
                                                 const DiagnosisCredential& cred) {
    require_positive_credential(state, cred);
    std::vector<ContactBundle> out;
    for (const ContactRecord& entry : state.contact_log()) {
        if (!within_window(ctx.params(), cred.t_diag, entry.t)) continue;
        Assignment w = ctx.contact_circuit().make_witness(entry_witness(state, cred, entry));
        ContactBundle bundle;
        bundle.proof = prove(ctx.contact_keys(), w.public_inputs, w);
        bundle.h = w.public_inputs[0];
        bundle.h_s = w.public_inputs[1];
        bundle.signature = cred.signature;
        out.push_back(std::move(bundle));
    }
    return out;
}

std::vector<PcdMessage> build_seed_messages(const AgentState& state, const Deployment& ctx,
                                            const DiagnosisCredential& cred) {
    require_positive_credential(state, cred);
    std::optional<size_t> idx = ctx.authority_index(cred.authority_key_commitment);
    if (!idx) throw Error("credential authority is not registered");
    std::vector<PcdMessage> out;
    for (const ContactRecord& entry : state.contact_log()) {
        if (!within_window(ctx.params(), cred.t_diag, entry.t)) continue;
        M0Witness wit{entry_witness(state, cred, entry), cred.signature};
        Assignment w = ctx.seed_circuit(*idx).make_witness(wit);
        out.push_back(pcd_seed(ctx.seed_keys(*idx), w));
    }
    return out;
}

TransitiveBundle build_transitive_bundle(const AgentState& state, const Deployment& ctx,
                                         const PcdMessage& matched,
                                         const ContactRecord& matched_entry,
                                         const ContactRecord& onward) {
    TransitiveWitness wit;
    wit.secret = state.secret();
    wit.token_in = matched_entry.token_other;
    wit.token_b1 = matched_entry.token_self;
    wit.token_b2 = onward.token_self;
    wit.token_out = onward.token_other;
    wit.t1 = matched_entry.t;
    wit.t2 = onward.t;
    Assignment w = ctx.extension_circuit().make_witness(wit);
    return TransitiveBundle{pcd_extend(ctx.extension_keys(), ctx.predicates(), matched, w)};
}

std::vector<Match> scan_and_match(const AgentState& state, const Deployment& ctx,
                                  std::span<const BundleRecord> page) {
    std::map<Bytes, const ContactRecord*> index;
    for (const ContactRecord& rec : state.contact_log()) {
        index.emplace(rec.h.to_bytes(), &rec);
    }

    std::vector<Match> out;
    for (const BundleRecord& record : page) {
        try {
            if (record.kind == BundleKind::Contact) {
                ContactBundle bundle = parse_contact_bundle(record.body);
                auto hit = index.find(bundle.h.to_bytes());
                if (hit == index.end()) continue;
                bool proof_ok = verify(ctx.contact_keys().verifying_key,
                                       bundle.proof.public_inputs, bundle.proof);
                bool sig_ok = false;
                for (const AuthorityRecord& rec : ctx.directory().records()) {
                    if (rsa_verify(rec.key, bundle.h_s.value(), bundle.signature)) {
                        sig_ok = true;
                        break;
                    }
                }
                out.push_back({BundleKind::Contact, 1, proof_ok && sig_ok, *hit->second,
                               std::nullopt});
            } else if (record.kind == BundleKind::Transitive) {
                PcdMessage msg = parse_pcd_message(record.body);
                if (msg.z.empty()) continue;
                auto hit = index.find(msg.z.front().to_bytes());
                if (hit == index.end()) continue;
                bool ok = pcd_verify(ctx.predicates(), msg);
                out.push_back({BundleKind::Transitive, msg.depth, ok, *hit->second,
                               std::move(msg)});
            }
        } catch (const ParseError&) {
            // Hostile or foreign registry content: skip, never abort the scan.
        }
    }
    return out;
}

} // namespace zkcontact
