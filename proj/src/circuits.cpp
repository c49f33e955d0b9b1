#include "zkcontact/circuits.hpp"

#include "zkcontact/errors.hpp"

namespace zkcontact {

namespace {

void append(std::vector<VarIndex>& out, const std::vector<VarIndex>& piece) {
    out.insert(out.end(), piece.begin(), piece.end());
}

/// Emits upper = base + offset and a step deriving it.
VarIndex emit_offset_var(CircuitBuilder& b, AssignPlan& plan, VarIndex base, uint32_t offset) {
    const Field& f = b.field();
    VarIndex out = b.add_aux();
    FieldElement off = f.from_u64(offset);
    b.constrain_eq(LinearCombination(base, f.one()).add(0, off),
                   LinearCombination(out, f.one()));
    plan.push([out, base, off](WitnessBuilder& w) { w.set(out, w.get(base) + off); });
    return out;
}

void pin_constant(CircuitBuilder& b, VarIndex v, const FieldElement& value) {
    b.constrain_eq(LinearCombination(v, b.field().one()), LinearCombination(0, value));
}

/// Named slots of the witness only; public inputs are listed in public_layout.
std::map<std::string, VarIndex> named_aux(const CircuitBuilder& b) {
    std::map<std::string, VarIndex> out;
    for (const auto& [name, idx] : b.named_vars()) {
        if (idx > b.cs().num_public) out.emplace(name, idx);
    }
    return out;
}

} // namespace

void AssignPlan::run(WitnessBuilder& w) const {
    for (const auto& step : steps) {
        try {
            step(w);
        } catch (const WitnessError&) {
            // Leave this step's outputs unset; they finalize to zero and the
            // assignment stays well-formed but unsatisfiable.
        }
    }
}

std::string circuit_kind_name(CircuitKind kind) {
    switch (kind) {
    case CircuitKind::Contact: return "contact";
    case CircuitKind::TransitiveStrawman: return "transitive-strawman";
    case CircuitKind::PcdM0: return "pcd-m0";
    case CircuitKind::PcdM1: return "pcd-m1";
    case CircuitKind::Health: return "health";
    }
    throw Error("unknown circuit kind");
}

namespace detail {

ContactCore emit_contact_core(CircuitBuilder& b, const ProtocolParams& p, VarIndex h,
                              VarIndex h_s, AssignPlan& plan) {
    const Field& f = b.field();
    ContactCore core;
    core.secret = b.add_aux("secret");
    core.t = b.add_aux("t");
    core.t_diag = b.add_aux("t_diag");
    core.status = b.add_aux("status");
    core.token_other = b.add_aux("token_other");

    auto secret_bits = plan.emit<BitsGadget>(b, core.secret, p.secret_bits());
    auto status_bits = plan.emit<BitsGadget>(b, core.status, kStatusBits);
    pin_constant(b, core.status, f.from_u64(kStatusPositive));
    auto t_bits = plan.emit<BitsGadget>(b, core.t, kEpochBits);
    auto t_diag_bits = plan.emit<BitsGadget>(b, core.t_diag, kEpochBits);

    // 1. h_s = H(S ‖ status ‖ t_diag)
    std::vector<VarIndex> diag_in = secret_bits->bits();
    append(diag_in, status_bits->bits());
    append(diag_in, t_diag_bits->bits());
    plan.emit<SubsetSumGadget>(b, p.diag_hash, diag_in, h_s);

    // 2. own token derives from (S, t)
    std::vector<VarIndex> token_in = secret_bits->bits();
    append(token_in, t_bits->bits());
    auto token_digest = plan.emit<SubsetSumGadget>(b, p.token_hash, token_in);
    auto split = plan.emit<TokenSplitGadget>(b, token_digest->digest());
    core.token_self = split->token();

    // 3. h = H2(sorted pair ‖ t)
    auto other_bits = plan.emit<BitsGadget>(b, core.token_other, p.token_bits());
    auto pair = plan.emit<CanonicalPairGadget>(b, core.token_self, core.token_other,
                                               p.token_bits());
    auto lo_bits = plan.emit<BitsGadget>(b, pair->lo(), p.token_bits());
    auto hi_bits = plan.emit<BitsGadget>(b, pair->hi(), p.token_bits());
    std::vector<VarIndex> contact_in = lo_bits->bits();
    append(contact_in, hi_bits->bits());
    append(contact_in, t_bits->bits());
    plan.emit<SubsetSumGadget>(b, p.contact_hash, contact_in, h);

    // 4. t_diag ≤ t + W
    VarIndex upper = emit_offset_var(b, plan, core.t, p.contact_window_epochs);
    plan.emit<LeqGadget>(b, core.t_diag, upper, kEpochBits + 1);
    return core;
}

void set_contact_inputs(WitnessBuilder& w, const ContactCore& core, const ContactWitness& wit) {
    const Field& f = w.field();
    w.set(core.secret, f.from_biguint(wit.secret));
    w.set(core.t, f.from_u64(wit.t));
    w.set(core.t_diag, f.from_u64(wit.t_diag));
    w.set(core.status, f.from_u64(wit.status));
    w.set(core.token_other, f.from_biguint(wit.token_other));
}

TransitiveCore emit_transitive_core(CircuitBuilder& b, const ProtocolParams& p, VarIndex h_i,
                                    VarIndex h_j, std::optional<uint32_t> min_gap,
                                    std::optional<uint32_t> max_gap, AssignPlan& plan) {
    TransitiveCore core;
    core.secret = b.add_aux("secret");
    core.t1 = b.add_aux("t1");
    core.t2 = b.add_aux("t2");
    core.token_in = b.add_aux("token_in");
    core.token_out = b.add_aux("token_out");

    auto secret_bits = plan.emit<BitsGadget>(b, core.secret, p.secret_bits());
    auto t1_bits = plan.emit<BitsGadget>(b, core.t1, kEpochBits);
    auto t2_bits = plan.emit<BitsGadget>(b, core.t2, kEpochBits);
    auto in_bits = plan.emit<BitsGadget>(b, core.token_in, p.token_bits());
    auto out_bits = plan.emit<BitsGadget>(b, core.token_out, p.token_bits());

    // Both own tokens derive from one secret: the two digests provably
    // involve the same middle party.
    auto emit_own_token = [&](const std::shared_ptr<BitsGadget>& epoch_bits) {
        std::vector<VarIndex> token_in_bits = secret_bits->bits();
        append(token_in_bits, epoch_bits->bits());
        auto digest = plan.emit<SubsetSumGadget>(b, p.token_hash, token_in_bits);
        return plan.emit<TokenSplitGadget>(b, digest->digest())->token();
    };
    core.token_b1 = emit_own_token(t1_bits);
    core.token_b2 = emit_own_token(t2_bits);

    auto emit_hop = [&](VarIndex ta, VarIndex tb, const std::shared_ptr<BitsGadget>& epoch_bits,
                        VarIndex digest) {
        auto pair = plan.emit<CanonicalPairGadget>(b, ta, tb, p.token_bits());
        auto lo_bits = plan.emit<BitsGadget>(b, pair->lo(), p.token_bits());
        auto hi_bits = plan.emit<BitsGadget>(b, pair->hi(), p.token_bits());
        std::vector<VarIndex> contact_in = lo_bits->bits();
        append(contact_in, hi_bits->bits());
        append(contact_in, epoch_bits->bits());
        plan.emit<SubsetSumGadget>(b, p.contact_hash, contact_in, digest);
    };
    emit_hop(core.token_in, core.token_b1, t1_bits, h_i);
    emit_hop(core.token_b2, core.token_out, t2_bits, h_j);

    if (min_gap) {
        VarIndex lower = emit_offset_var(b, plan, core.t1, *min_gap);
        plan.emit<LeqGadget>(b, lower, core.t2, kEpochBits + 1);
    }
    if (max_gap) {
        VarIndex upper = emit_offset_var(b, plan, core.t1, *max_gap);
        plan.emit<LeqGadget>(b, core.t2, upper, kEpochBits + 1);
    }
    return core;
}

namespace {

void set_transitive_inputs(WitnessBuilder& w, const TransitiveCore& core,
                           const TransitiveWitness& wit) {
    const Field& f = w.field();
    w.set(core.secret, f.from_biguint(wit.secret));
    w.set(core.t1, f.from_u64(wit.t1));
    w.set(core.t2, f.from_u64(wit.t2));
    w.set(core.token_in, f.from_biguint(wit.token_in));
    w.set(core.token_out, f.from_biguint(wit.token_out));
}

void claim_own_tokens(WitnessBuilder& w, const TransitiveCore& core,
                      const TransitiveWitness& wit) {
    const Field& f = w.field();
    w.set(core.token_b1, f.from_biguint(wit.token_b1));
    w.set(core.token_b2, f.from_biguint(wit.token_b2));
}

} // namespace

} // namespace detail

ContactCircuit::ContactCircuit(const ProtocolParams& params) {
    params.validate();
    CircuitBuilder b(*params.field);
    h_ = b.add_public("h");
    h_s_ = b.add_public("h_s");
    core_ = detail::emit_contact_core(b, params, h_, h_s_, plan_);
    spec_.kind = CircuitKind::Contact;
    spec_.public_layout = b.public_names();
    spec_.named_witness = named_aux(b);
    spec_.params = params;
    spec_.cs = b.take();
}

Assignment ContactCircuit::make_witness(const ContactWitness& wit) const {
    WitnessBuilder w(spec_.cs);
    detail::set_contact_inputs(w, core_, wit);
    plan_.run(w);
    // Honor the claimed own token: a claim that disagrees with the in-circuit
    // derivation leaves the assignment unsatisfiable rather than repaired.
    w.set(core_.token_self, spec_.cs.field->from_biguint(wit.token_self));
    return w.take();
}

TransitiveCircuit::TransitiveCircuit(const ProtocolParams& params) {
    params.validate();
    CircuitBuilder b(*params.field);
    h_i_ = b.add_public("h_i");
    h_j_ = b.add_public("h_j");
    core_ = detail::emit_transitive_core(b, params, h_i_, h_j_, std::nullopt,
                                         params.incubation_epochs, plan_);
    spec_.kind = CircuitKind::TransitiveStrawman;
    spec_.public_layout = b.public_names();
    spec_.named_witness = named_aux(b);
    spec_.params = params;
    spec_.cs = b.take();
}

Assignment TransitiveCircuit::make_witness(const TransitiveWitness& wit) const {
    WitnessBuilder w(spec_.cs);
    detail::set_transitive_inputs(w, core_, wit);
    plan_.run(w);
    detail::claim_own_tokens(w, core_, wit);
    return w.take();
}

PcdM0Circuit::PcdM0Circuit(const ProtocolParams& params, const RsaPublicKey& authority)
    : authority_(authority) {
    params.validate();
    if (authority.n.bit_length() > params.rsa_modulus_bits) {
        throw Error("authority modulus exceeds the configured width");
    }
    const Field& f = *params.field;
    CircuitBuilder b(f);
    h_i_ = b.add_public("h_i");
    h_s_ = b.add_public("h_s");
    commitment_var_ = b.add_public("p_s_commitment");
    core_ = detail::emit_contact_core(b, params, h_i_, h_s_, plan_);

    commitment_ = authority_commitment_eval(params, authority.n);
    pin_constant(b, commitment_var_, commitment_);
    {
        VarIndex cv = commitment_var_;
        FieldElement c = commitment_;
        plan_.push([cv, c](WitnessBuilder& w) { w.set(cv, c); });
    }

    radix_ = RadixParams::choose(f, params.rsa_modulus_bits);
    rsa_ = plan_.emit<Rsa3VerifyGadget>(b, h_s_, authority.n, radix_);

    spec_.kind = CircuitKind::PcdM0;
    spec_.public_layout = b.public_names();
    spec_.named_witness = named_aux(b);
    spec_.params = params;
    spec_.cs = b.take();
}

Assignment PcdM0Circuit::make_witness(const M0Witness& wit) const {
    const Field& f = *spec_.cs.field;
    WitnessBuilder w(spec_.cs);
    detail::set_contact_inputs(w, core_, wit.contact);
    try {
        std::vector<BigUint> digits = radix_digits(wit.signature, radix_);
        for (size_t i = 0; i < digits.size(); ++i) {
            w.set(rsa_->sig_digits()[i], f.from_biguint(digits[i]));
        }
    } catch (const Error&) {
        // Signature outside digit capacity: leave the digits unset.
    }
    plan_.run(w);
    w.set(core_.token_self, f.from_biguint(wit.contact.token_self));
    return w.take();
}

PcdM1Circuit::PcdM1Circuit(const ProtocolParams& params) {
    params.validate();
    CircuitBuilder b(*params.field);
    h_j_ = b.add_public("h_j");
    pred_digest_ = b.add_aux("pred_digest");
    std::optional<uint32_t> min_gap, max_gap;
    if (params.m1_lower_bound) min_gap = params.incubation_epochs;
    if (params.m1_upper_bound) max_gap = params.contact_window_epochs;
    core_ = detail::emit_transitive_core(b, params, pred_digest_, h_j_, min_gap, max_gap,
                                         plan_);
    spec_.kind = CircuitKind::PcdM1;
    spec_.public_layout = b.public_names();
    spec_.named_witness = named_aux(b);
    spec_.params = params;
    spec_.cs = b.take();
}

Assignment PcdM1Circuit::make_witness(const TransitiveWitness& wit) const {
    WitnessBuilder w(spec_.cs);
    detail::set_transitive_inputs(w, core_, wit);
    plan_.run(w);
    detail::claim_own_tokens(w, core_, wit);
    return w.take();
}

HealthCircuit::HealthCircuit(const ProtocolParams& params) {
    params.validate();
    const Field& f = *params.field;
    CircuitBuilder b(f);
    h_s_ = b.add_public("h_s");
    t_ = b.add_public("t");
    secret_ = b.add_aux("secret");
    t_diag_ = b.add_aux("t_diag");
    status_ = b.add_aux("status");

    auto secret_bits = plan_.emit<BitsGadget>(b, secret_, params.secret_bits());
    auto status_bits = plan_.emit<BitsGadget>(b, status_, kStatusBits);
    pin_constant(b, status_, f.from_u64(kStatusNegative));
    auto t_diag_bits = plan_.emit<BitsGadget>(b, t_diag_, kEpochBits);
    plan_.emit<BitsGadget>(b, t_, kEpochBits); // public epoch is range-checked too

    std::vector<VarIndex> diag_in = secret_bits->bits();
    append(diag_in, status_bits->bits());
    append(diag_in, t_diag_bits->bits());
    plan_.emit<SubsetSumGadget>(b, params.diag_hash, diag_in, h_s_);

    // t ≤ t′ + D
    VarIndex upper = emit_offset_var(b, plan_, t_diag_, params.health_window_epochs);
    plan_.emit<LeqGadget>(b, t_, upper, kEpochBits + 1);

    spec_.kind = CircuitKind::Health;
    spec_.public_layout = b.public_names();
    spec_.named_witness = named_aux(b);
    spec_.params = params;
    spec_.cs = b.take();
}

Assignment HealthCircuit::make_witness(const HealthWitness& wit, uint32_t now_epoch) const {
    const Field& f = *spec_.cs.field;
    WitnessBuilder w(spec_.cs);
    w.set(secret_, f.from_biguint(wit.secret));
    w.set(t_diag_, f.from_u64(wit.t_diag));
    w.set(status_, f.from_u64(wit.status));
    w.set(t_, f.from_u64(now_epoch));
    plan_.run(w);
    return w.take();
}

CredentialCircuit::CredentialCircuit(const ProtocolParams& params) {
    params.validate();
    CircuitBuilder b(*params.field);
    h_s_ = b.add_public("h_s");
    status_ = b.add_public("status");
    t_diag_ = b.add_public("t_diag");
    secret_ = b.add_aux("secret");

    auto secret_bits = plan_.emit<BitsGadget>(b, secret_, params.secret_bits());
    auto status_bits = plan_.emit<BitsGadget>(b, status_, kStatusBits);
    auto t_diag_bits = plan_.emit<BitsGadget>(b, t_diag_, kEpochBits);

    std::vector<VarIndex> diag_in = secret_bits->bits();
    append(diag_in, status_bits->bits());
    append(diag_in, t_diag_bits->bits());
    plan_.emit<SubsetSumGadget>(b, params.diag_hash, diag_in, h_s_);

    spec_.kind = CircuitKind::Health;
    spec_.public_layout = b.public_names();
    spec_.named_witness = named_aux(b);
    spec_.params = params;
    spec_.cs = b.take();
}

Assignment CredentialCircuit::make_witness(const HealthWitness& wit) const {
    const Field& f = *spec_.cs.field;
    WitnessBuilder w(spec_.cs);
    w.set(secret_, f.from_biguint(wit.secret));
    w.set(status_, f.from_u64(wit.status));
    w.set(t_diag_, f.from_u64(wit.t_diag));
    plan_.run(w);
    return w.take();
}

Bytes serialize_circuit_spec(const CircuitSpec& spec) {
    ByteWriter w;
    w.raw(Bytes{'C', 'S', 'P', 'C'});
    w.u16(1);
    w.u8(static_cast<uint8_t>(spec.kind));
    w.u32(spec.params.epoch_seconds);
    w.u32(spec.params.contact_window_epochs);
    w.u32(spec.params.incubation_epochs);
    w.u32(spec.params.health_window_epochs);
    w.u32(spec.params.rsa_modulus_bits);
    uint8_t flags = 0;
    if (spec.params.m1_lower_bound) flags |= 1;
    if (spec.params.m1_upper_bound) flags |= 2;
    w.u8(flags);
    w.u16(static_cast<uint16_t>(spec.public_layout.size()));
    for (const std::string& name : spec.public_layout) w.str16(name);
    w.u16(static_cast<uint16_t>(spec.named_witness.size()));
    for (const auto& [name, idx] : spec.named_witness) {
        w.str16(name);
        w.u32(idx);
    }
    w.bytes32(serialize_constraint_system(spec.cs));
    return w.take();
}

CircuitSpec parse_circuit_spec(const Bytes& data) {
    ByteReader r(data);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), "CSPC")) {
        throw ParseError("not a circuit spec");
    }
    if (r.u16() != 1) throw ParseError("unsupported circuit spec version");
    uint8_t kind_raw = r.u8();
    if (kind_raw < 1 || kind_raw > 5) throw ParseError("unknown circuit kind");

    uint32_t epoch_seconds = r.u32();
    uint32_t window_w = r.u32();
    uint32_t window_i = r.u32();
    uint32_t window_d = r.u32();
    uint32_t rsa_bits = r.u32();
    uint8_t flags = r.u8();
    if (flags > 3) throw ParseError("unknown parameter flags");

    std::vector<std::string> layout;
    size_t n_layout = r.u16();
    for (size_t i = 0; i < n_layout; ++i) layout.push_back(r.str16());
    std::map<std::string, VarIndex> named;
    size_t n_named = r.u16();
    for (size_t i = 0; i < n_named; ++i) {
        std::string name = r.str16();
        VarIndex idx = r.u32();
        if (!named.emplace(std::move(name), idx).second) {
            throw ParseError("duplicate named witness slot");
        }
    }

    Bytes cs_bytes = r.bytes32();
    r.expect_end();

    CircuitSpec spec;
    spec.kind = static_cast<CircuitKind>(kind_raw);
    spec.cs = parse_constraint_system(cs_bytes);
    if (layout.size() != spec.cs.num_public) {
        throw ParseError("public layout disagrees with constraint system");
    }
    for (const auto& [name, idx] : named) {
        if (idx == 0 || idx >= spec.cs.num_variables()) {
            throw ParseError("named witness slot out of range");
        }
    }
    spec.public_layout = std::move(layout);
    spec.named_witness = std::move(named);

    ProtocolParams params;
    try {
        params = ProtocolParams::make(*spec.cs.field, rsa_bits, epoch_seconds);
    } catch (const Error& e) {
        throw ParseError(std::string("invalid protocol parameters: ") + e.what());
    }
    params.contact_window_epochs = window_w;
    params.incubation_epochs = window_i;
    params.health_window_epochs = window_d;
    params.m1_lower_bound = (flags & 1) != 0;
    params.m1_upper_bound = (flags & 2) != 0;
    try {
        params.validate();
    } catch (const Error& e) {
        throw ParseError(std::string("invalid protocol parameters: ") + e.what());
    }
    spec.params = std::move(params);
    return spec;
}

} // namespace zkcontact
