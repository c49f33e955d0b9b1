#include "zkcontact/r1cs.hpp"

#include <algorithm>

#include "zkcontact/errors.hpp"

namespace zkcontact {

void ConstraintSystem::validate() const {
    if (!field) throw Error("constraint system has no field");
    const size_t bound = num_variables();
    for (const Constraint& c : constraints) {
        for (const LinearCombination* lc : {&c.a, &c.b, &c.c}) {
            for (const Term& t : lc->terms) {
                if (t.index >= bound) throw Error("constraint references unknown variable");
            }
        }
    }
}

FieldElement lc_eval(const LinearCombination& lc, const Field& field,
                     std::span<const FieldElement> w) {
    FieldElement acc = field.zero();
    for (const Term& t : lc.terms) {
        acc = acc + t.coeff * w[t.index];
    }
    return acc;
}

bool cs_check(const ConstraintSystem& cs, const Assignment& w) {
    cs.validate();
    if (w.public_inputs.size() != cs.num_public || w.aux.size() != cs.num_aux) {
        throw Error("assignment dimensions do not match constraint system");
    }
    std::vector<FieldElement> dense;
    dense.reserve(cs.num_variables());
    dense.push_back(cs.field->one());
    dense.insert(dense.end(), w.public_inputs.begin(), w.public_inputs.end());
    dense.insert(dense.end(), w.aux.begin(), w.aux.end());

    for (const Constraint& c : cs.constraints) {
        FieldElement left = lc_eval(c.a, *cs.field, dense) * lc_eval(c.b, *cs.field, dense);
        if (left != lc_eval(c.c, *cs.field, dense)) return false;
    }
    return true;
}

namespace {

void write_lc(ByteWriter& w, const LinearCombination& lc) {
    w.u32(static_cast<uint32_t>(lc.terms.size()));
    for (const Term& t : lc.terms) {
        w.u32(t.index);
        w.raw(t.coeff.to_bytes());
    }
}

LinearCombination read_lc(ByteReader& r, const Field& field) {
    LinearCombination lc;
    uint32_t n = r.u32();
    lc.terms.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        VarIndex idx = r.u32();
        FieldElement coeff = field.from_bytes(r.raw(field.element_bytes()));
        lc.terms.push_back({idx, std::move(coeff)});
    }
    return lc;
}

constexpr uint16_t kFormatVersion = 1;

} // namespace

Bytes serialize_constraint_system(const ConstraintSystem& cs) {
    if (!cs.field) throw Error("constraint system has no field");
    ByteWriter w;
    w.raw(Bytes{'R', '1', 'C', 'S'});
    w.u16(kFormatVersion);
    Bytes prime = cs.field->prime().to_bytes_be(cs.field->element_bytes());
    w.u8(static_cast<uint8_t>(prime.size()));
    w.raw(prime);
    w.u32(cs.num_public);
    w.u32(cs.num_aux);
    w.u32(static_cast<uint32_t>(cs.constraints.size()));
    for (const Constraint& c : cs.constraints) {
        write_lc(w, c.a);
        write_lc(w, c.b);
        write_lc(w, c.c);
    }
    return w.take();
}

ConstraintSystem parse_constraint_system(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), "R1CS")) {
        throw ParseError("bad constraint-system magic");
    }
    if (r.u16() != kFormatVersion) throw ParseError("unsupported constraint-system version");
    uint8_t prime_len = r.u8();
    const Field& field = Field::get(BigUint::from_bytes_be(r.raw(prime_len)));

    ConstraintSystem cs;
    cs.field = &field;
    cs.num_public = r.u32();
    cs.num_aux = r.u32();
    uint32_t n = r.u32();
    cs.constraints.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        Constraint c;
        c.a = read_lc(r, field);
        c.b = read_lc(r, field);
        c.c = read_lc(r, field);
        cs.constraints.push_back(std::move(c));
    }
    r.expect_end();
    cs.validate();
    return cs;
}

Digest circuit_digest(const ConstraintSystem& cs) {
    return sha256(serialize_constraint_system(cs));
}

} // namespace zkcontact
