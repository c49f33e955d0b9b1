#pragma once

#include <map>
#include <string>
#include <vector>

#include "zkcontact/r1cs.hpp"

namespace zkcontact {

/// Variables a gadget consumed and produced, plus the contiguous range
/// [start, end) of constraints it appended to the enclosing system.
struct GadgetHandle {
    std::vector<VarIndex> input_vars;
    std::vector<VarIndex> output_vars;
    std::pair<uint32_t, uint32_t> constraint_span{0, 0};

    size_t constraint_count() const { return constraint_span.second - constraint_span.first; }
};

/// Incremental R1CS author. All public variables must be allocated before
/// the first auxiliary one so indices stay stable: publics occupy
/// 1..num_public, aux variables follow.
class CircuitBuilder {
public:
    explicit CircuitBuilder(const Field& field) { cs_.field = &field; }

    const Field& field() const { return *cs_.field; }

    VarIndex add_public(const std::string& name);
    /// Aux variable; a non-empty name registers a findable witness slot.
    VarIndex add_aux(const std::string& name = "");

    void constrain(LinearCombination a, LinearCombination b, LinearCombination c);
    /// lhs == rhs as linear relation: (lhs) * 1 = (rhs).
    void constrain_eq(LinearCombination lhs, LinearCombination rhs);

    uint32_t constraint_count() const { return static_cast<uint32_t>(cs_.constraints.size()); }
    VarIndex lookup(const std::string& name) const; // throws Error if unknown

    const std::vector<std::string>& public_names() const { return public_names_; }
    const std::map<std::string, VarIndex>& named_vars() const { return named_; }

    const ConstraintSystem& cs() const { return cs_; }
    ConstraintSystem take() { return std::move(cs_); }

private:
    ConstraintSystem cs_;
    std::vector<std::string> public_names_;
    std::map<std::string, VarIndex> named_;
    bool aux_started_ = false;
};

/// Dense witness vector under construction. Unset variables read back as
/// errors but finalize to zero, so a failed gadget assignment degrades to an
/// unsatisfiable (never malformed) assignment.
class WitnessBuilder {
public:
    explicit WitnessBuilder(const ConstraintSystem& cs);

    const Field& field() const { return *cs_->field; }
    const ConstraintSystem& cs() const { return *cs_; }

    void set(VarIndex v, const FieldElement& value);
    /// Throws WitnessError when the variable has not been assigned yet.
    const FieldElement& get(VarIndex v) const;
    bool is_set(VarIndex v) const { return set_.at(v); }
    FieldElement eval(const LinearCombination& lc) const;

    Assignment take();

private:
    const ConstraintSystem* cs_;
    std::vector<FieldElement> values_; // index 0 fixed to one
    std::vector<bool> set_;
};

} // namespace zkcontact
