#pragma once

#include <span>
#include <vector>

#include "zkcontact/digest.hpp"
#include "zkcontact/field.hpp"

namespace zkcontact {

/// Index into the witness vector w = (1 ‖ public ‖ aux); 0 is the constant one.
using VarIndex = uint32_t;

struct Term {
    VarIndex index;
    FieldElement coeff;
    bool operator==(const Term&) const = default;
};

/// Sparse linear combination Σ coeff·w[index].
struct LinearCombination {
    std::vector<Term> terms;

    LinearCombination() = default;
    LinearCombination(VarIndex index, FieldElement coeff) : terms{{index, std::move(coeff)}} {}

    LinearCombination& add(VarIndex index, FieldElement coeff) {
        terms.push_back({index, std::move(coeff)});
        return *this;
    }
    bool operator==(const LinearCombination&) const = default;
};

/// ⟨a,w⟩ · ⟨b,w⟩ = ⟨c,w⟩
struct Constraint {
    LinearCombination a, b, c;
    bool operator==(const Constraint&) const = default;
};

struct ConstraintSystem {
    const Field* field = nullptr;
    uint32_t num_public = 0;
    uint32_t num_aux = 0;
    std::vector<Constraint> constraints;

    size_t num_variables() const { return 1 + num_public + num_aux; }
    /// Throws Error if any term references a variable out of range.
    void validate() const;
};

struct Assignment {
    std::vector<FieldElement> public_inputs;
    std::vector<FieldElement> aux;
    bool operator==(const Assignment&) const = default;
};

/// Evaluates lc over a dense witness vector (w[0] must be the constant one).
FieldElement lc_eval(const LinearCombination& lc, const Field& field,
                     std::span<const FieldElement> w);

/// True iff every constraint's residual is zero. Dimension mismatch is an
/// Error, distinct from an unsatisfied system.
bool cs_check(const ConstraintSystem& cs, const Assignment& w);

/// Frozen binary format: "R1CS" | version | prime | counts | rows. Bit-exact;
/// circuit_digest and all golden values depend on it.
Bytes serialize_constraint_system(const ConstraintSystem& cs);
ConstraintSystem parse_constraint_system(std::span<const uint8_t> bytes);

Digest circuit_digest(const ConstraintSystem& cs);

} // namespace zkcontact
