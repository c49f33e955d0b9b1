#include "zkcontact/proof_engine.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "zkcontact/bytes.hpp"

namespace zkcontact {

namespace {

constexpr uint16_t kKeyVersion = 1;
constexpr uint16_t kProofVersion = 1;
constexpr uint16_t kMessageVersion = 1;

const char* key_magic(bool verifying) { return verifying ? "ZKVK" : "ZKPK"; }

Bytes encode_key(bool verifying, const BackendConfig& cfg, const Bytes& spec_bytes) {
    ByteWriter w;
    const char* magic = key_magic(verifying);
    w.raw(std::span(reinterpret_cast<const uint8_t*>(magic), 4));
    w.u16(kKeyVersion);
    w.str16(cfg.backend_id);
    w.u32(cfg.security_parameter);
    w.bytes32(spec_bytes);
    return w.take();
}

struct ParsedKey {
    std::string backend_id;
    uint32_t security_parameter = 0;
    CircuitSpec spec;
    Digest digest{};
};

/// Keys are parsed once and cached by the hash of their bytes; the handful of
/// circuits a deployment uses keeps the cache tiny, and repeat verification
/// pays only for the constraint check.
std::shared_ptr<const ParsedKey> parse_key(const Bytes& key_bytes, bool verifying) {
    static std::mutex mu;
    static std::map<std::pair<bool, Digest>, std::shared_ptr<const ParsedKey>> cache;
    std::pair<bool, Digest> slot{verifying, sha256(key_bytes)};
    {
        std::lock_guard lock(mu);
        auto it = cache.find(slot);
        if (it != cache.end()) return it->second;
    }
    ByteReader r(key_bytes);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(),
                    reinterpret_cast<const uint8_t*>(key_magic(verifying)))) {
        throw ParseError("bad key magic");
    }
    if (r.u16() != kKeyVersion) throw ParseError("unsupported key version");
    auto key = std::make_shared<ParsedKey>();
    key->backend_id = r.str16();
    if (key->backend_id != kDirectWitnessBackend) {
        throw ParseError("unknown proof backend: " + key->backend_id);
    }
    key->security_parameter = r.u32();
    Bytes spec_bytes = r.bytes32();
    r.expect_end();
    key->spec = parse_circuit_spec(spec_bytes);
    key->digest = circuit_digest(key->spec.cs);
    std::lock_guard lock(mu);
    return cache.emplace(std::move(slot), std::move(key)).first->second;
}

/// Direct-witness payload: circuit digest, the full auxiliary assignment and
/// an optional embedded predecessor message (empty outside PCD extensions).
Bytes encode_payload(const Digest& digest, std::span<const FieldElement> aux,
                     const Bytes& predecessor) {
    ByteWriter aux_block;
    for (const auto& e : aux) aux_block.raw(e.to_bytes());
    ByteWriter w;
    w.raw(std::span<const uint8_t>(digest.data(), digest.size()));
    w.u32(static_cast<uint32_t>(aux.size()));
    w.bytes32(aux_block.data());
    w.bytes32(predecessor);
    return w.take();
}

struct RawPayload {
    Digest digest{};
    uint32_t aux_count = 0;
    Bytes aux_block;
    Bytes predecessor;
};

/// Structural split that needs no field; element decoding happens against
/// whichever key the caller verifies under.
RawPayload split_payload(const Bytes& payload) {
    ByteReader r(payload);
    RawPayload out;
    auto d = r.raw(out.digest.size());
    std::copy(d.begin(), d.end(), out.digest.begin());
    out.aux_count = r.u32();
    out.aux_block = r.bytes32();
    out.predecessor = r.bytes32();
    r.expect_end();
    return out;
}

std::vector<FieldElement> decode_aux(const RawPayload& pl, const Field& field) {
    if (pl.aux_block.size() != size_t(pl.aux_count) * field.element_bytes()) {
        throw ParseError("auxiliary block length mismatch");
    }
    std::vector<FieldElement> aux;
    aux.reserve(pl.aux_count);
    std::span<const uint8_t> block(pl.aux_block);
    for (uint32_t i = 0; i < pl.aux_count; ++i) {
        aux.push_back(field.from_bytes(block.subspan(size_t(i) * field.element_bytes(),
                                                     field.element_bytes())));
    }
    return aux;
}

bool same_elements(const std::vector<FieldElement>& a, const std::vector<FieldElement>& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

Proof prove_with(const std::shared_ptr<const ParsedKey>& key, const Assignment& witness,
                 const Bytes& predecessor) {
    bool satisfied = false;
    try {
        satisfied = witness.public_inputs.size() == key->spec.cs.num_public &&
                    witness.aux.size() == key->spec.cs.num_aux &&
                    cs_check(key->spec.cs, witness);
    } catch (const Error&) {
        satisfied = false;
    }
    if (!satisfied) {
        throw ProveRefused("witness does not satisfy " + circuit_kind_name(key->spec.kind) +
                           " constraints");
    }
    Proof proof;
    proof.backend_id = key->backend_id;
    proof.public_inputs = witness.public_inputs;
    proof.payload = encode_payload(key->digest, witness.aux, predecessor);
    return proof;
}

/// Index into the aux vector of the named witness slot, or nullopt.
std::optional<size_t> aux_slot(const CircuitSpec& spec, const std::string& name) {
    auto it = spec.named_witness.find(name);
    if (it == spec.named_witness.end()) return std::nullopt;
    VarIndex idx = it->second;
    if (idx <= spec.cs.num_public) return std::nullopt;
    return size_t(idx) - 1 - spec.cs.num_public;
}

bool verify_chain(const PcdPredicateSet& set, const PcdMessage& msg) {
    if (msg.depth < 1 || msg.depth > kMaxChainDepth) return false;
    if (!same_elements(msg.z, msg.proof.public_inputs)) return false;

    if (msg.predicate == CircuitKind::PcdM0) {
        if (msg.depth != 1) return false;
        for (const auto& key : set.seed_keys) {
            if (!verify(key.verifying_key, msg.z, msg.proof)) continue;
            // Seeds carry no predecessor; reject smuggled chain bytes.
            return split_payload(msg.proof.payload).predecessor.empty();
        }
        return false;
    }

    if (msg.predicate != CircuitKind::PcdM1) return false;
    if (msg.depth < 2) return false;
    if (!verify(set.extend_key.verifying_key, msg.z, msg.proof)) return false;

    auto key = parse_key(set.extend_key.verifying_key, true);
    RawPayload pl = split_payload(msg.proof.payload);
    if (pl.predecessor.empty()) return false;
    PcdMessage pred = parse_pcd_message(pl.predecessor);
    if (pred.depth != msg.depth - 1) return false;

    auto slot = aux_slot(key->spec, "pred_digest");
    if (!slot) return false;
    std::vector<FieldElement> aux = decode_aux(pl, *key->spec.cs.field);
    if (*slot >= aux.size() || pred.z.empty()) return false;
    if (aux[*slot].to_bytes() != pred.z.front().to_bytes()) return false;

    return verify_chain(set, pred);
}

} // namespace

KeyPair generate_keys(const BackendConfig& cfg, const CircuitSpec& circuit) {
    if (cfg.backend_id != kDirectWitnessBackend) {
        throw Error("unknown proof backend: " + cfg.backend_id);
    }
    if (cfg.security_parameter < 80) {
        throw Error("security parameter below the 80-bit floor");
    }
    circuit.cs.validate();
    Bytes spec_bytes = serialize_circuit_spec(circuit);
    KeyPair keys;
    keys.proving_key = encode_key(false, cfg, spec_bytes);
    keys.verifying_key = encode_key(true, cfg, spec_bytes);
    keys.circuit_digest = circuit_digest(circuit.cs);
    return keys;
}

Proof prove(const KeyPair& keys, const std::vector<FieldElement>& public_inputs,
            const Assignment& witness) {
    auto key = parse_key(keys.proving_key, false);
    if (key->digest != keys.circuit_digest) {
        throw ProveRefused("proving key disagrees with its circuit digest");
    }
    if (!same_elements(public_inputs, witness.public_inputs)) {
        throw ProveRefused("instance disagrees with witness public inputs");
    }
    return prove_with(key, witness, {});
}

bool verify(const Bytes& verifying_key, const std::vector<FieldElement>& public_inputs,
            const Proof& proof) {
    try {
        auto key = parse_key(verifying_key, true);
        if (proof.backend_id != key->backend_id) return false;
        if (!same_elements(proof.public_inputs, public_inputs)) return false;

        const Field& field = *key->spec.cs.field;
        Assignment w;
        w.public_inputs.reserve(public_inputs.size());
        // Normalize through canonical bytes so foreign-field elements fail
        // the strict decode instead of slipping into the constraint check.
        for (const auto& e : public_inputs) w.public_inputs.push_back(field.from_bytes(e.to_bytes()));

        RawPayload pl = split_payload(proof.payload);
        if (pl.digest != key->digest) return false;
        if (w.public_inputs.size() != key->spec.cs.num_public) return false;
        if (pl.aux_count != key->spec.cs.num_aux) return false;
        w.aux = decode_aux(pl, field);
        return cs_check(key->spec.cs, w);
    } catch (const std::exception&) {
        return false;
    }
}

Bytes serialize_proof(const Proof& proof) {
    ByteWriter w;
    w.raw(std::span(reinterpret_cast<const uint8_t*>("ZKPF"), 4));
    w.u16(kProofVersion);
    w.str16(proof.backend_id);
    if (proof.public_inputs.empty()) {
        w.u8(0);
    } else {
        const Field& field = proof.public_inputs.front().field();
        Bytes prime = field.prime().to_bytes_be(field.element_bytes());
        w.u8(static_cast<uint8_t>(prime.size()));
        w.raw(prime);
    }
    w.u32(static_cast<uint32_t>(proof.public_inputs.size()));
    for (const auto& e : proof.public_inputs) w.raw(e.to_bytes());
    w.bytes32(proof.payload);
    return w.take();
}

Proof parse_proof(const Bytes& data) {
    ByteReader r(data);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), reinterpret_cast<const uint8_t*>("ZKPF"))) {
        throw ParseError("bad proof magic");
    }
    if (r.u16() != kProofVersion) throw ParseError("unsupported proof version");
    Proof proof;
    proof.backend_id = r.str16();
    uint8_t prime_len = r.u8();
    const Field* field = nullptr;
    if (prime_len > 0) field = &Field::get(BigUint::from_bytes_be(r.raw(prime_len)));
    uint32_t count = r.u32();
    if (count > 0 && field == nullptr) throw ParseError("public inputs without a field");
    proof.public_inputs.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        proof.public_inputs.push_back(field->from_bytes(r.raw(field->element_bytes())));
    }
    proof.payload = r.bytes32();
    r.expect_end();
    return proof;
}

Bytes serialize_pcd_message(const PcdMessage& msg) {
    ByteWriter w;
    w.raw(std::span(reinterpret_cast<const uint8_t*>("ZKPM"), 4));
    w.u16(kMessageVersion);
    w.u8(static_cast<uint8_t>(msg.predicate));
    w.u32(msg.depth);
    w.bytes32(serialize_proof(msg.proof));
    return w.take();
}

PcdMessage parse_pcd_message(const Bytes& data) {
    ByteReader r(data);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), reinterpret_cast<const uint8_t*>("ZKPM"))) {
        throw ParseError("bad message magic");
    }
    if (r.u16() != kMessageVersion) throw ParseError("unsupported message version");
    PcdMessage msg;
    uint8_t kind = r.u8();
    if (kind < uint8_t(CircuitKind::Contact) || kind > uint8_t(CircuitKind::Health)) {
        throw ParseError("unknown predicate kind");
    }
    msg.predicate = CircuitKind(kind);
    msg.depth = r.u32();
    msg.proof = parse_proof(r.bytes32());
    msg.z = msg.proof.public_inputs;
    r.expect_end();
    return msg;
}

PcdMessage pcd_seed(const KeyPair& seed_key, const Assignment& witness) {
    auto key = parse_key(seed_key.proving_key, false);
    if (key->spec.kind != CircuitKind::PcdM0) {
        throw ProveRefused("key does not belong to a seed predicate");
    }
    PcdMessage msg;
    msg.predicate = CircuitKind::PcdM0;
    msg.depth = 1;
    msg.proof = prove_with(key, witness, {});
    msg.z = msg.proof.public_inputs;
    return msg;
}

PcdMessage pcd_extend(const KeyPair& extend_key, const PcdPredicateSet& set,
                      const PcdMessage& predecessor, const Assignment& witness) {
    auto key = parse_key(extend_key.proving_key, false);
    if (key->spec.kind != CircuitKind::PcdM1) {
        throw ProveRefused("key does not belong to an extension predicate");
    }
    if (predecessor.depth >= kMaxChainDepth) {
        throw ProveRefused("chain depth limit reached");
    }
    if (!pcd_verify(set, predecessor)) {
        throw ProveRefused("predecessor message does not verify");
    }
    auto slot = aux_slot(key->spec, "pred_digest");
    if (!slot) throw Error("extension circuit lacks a pred_digest slot");
    if (predecessor.z.empty() || *slot >= witness.aux.size() ||
        witness.aux[*slot].to_bytes() != predecessor.z.front().to_bytes()) {
        throw ProveRefused("witness does not bind the predecessor digest");
    }
    PcdMessage msg;
    msg.predicate = CircuitKind::PcdM1;
    msg.depth = predecessor.depth + 1;
    msg.proof = prove_with(key, witness, serialize_pcd_message(predecessor));
    msg.z = msg.proof.public_inputs;
    return msg;
}

bool pcd_verify(const PcdPredicateSet& set, const PcdMessage& msg) {
    try {
        return verify_chain(set, msg);
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<PcdMessage> pcd_chain(const PcdMessage& msg) {
    std::vector<PcdMessage> chain{msg};
    while (true) {
        Bytes predecessor = split_payload(chain.back().proof.payload).predecessor;
        if (predecessor.empty()) break;
        if (chain.size() >= kMaxChainDepth) throw ParseError("chain exceeds the depth limit");
        chain.push_back(parse_pcd_message(predecessor));
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

} // namespace zkcontact
