#include "zkcontact/builder.hpp"

#include "zkcontact/errors.hpp"

namespace zkcontact {

VarIndex CircuitBuilder::add_public(const std::string& name) {
    if (aux_started_) throw Error("public inputs must be allocated before aux variables");
    if (name.empty() || named_.contains(name)) throw Error("public input needs a fresh name");
    VarIndex idx = 1 + cs_.num_public;
    ++cs_.num_public;
    public_names_.push_back(name);
    named_.emplace(name, idx);
    return idx;
}

VarIndex CircuitBuilder::add_aux(const std::string& name) {
    aux_started_ = true;
    VarIndex idx = static_cast<VarIndex>(1 + cs_.num_public + cs_.num_aux);
    ++cs_.num_aux;
    if (!name.empty()) {
        if (named_.contains(name)) throw Error("duplicate witness slot name: " + name);
        named_.emplace(name, idx);
    }
    return idx;
}

void CircuitBuilder::constrain(LinearCombination a, LinearCombination b, LinearCombination c) {
    cs_.constraints.push_back({std::move(a), std::move(b), std::move(c)});
}

void CircuitBuilder::constrain_eq(LinearCombination lhs, LinearCombination rhs) {
    constrain(std::move(lhs), LinearCombination(0, field().one()), std::move(rhs));
}

VarIndex CircuitBuilder::lookup(const std::string& name) const {
    auto it = named_.find(name);
    if (it == named_.end()) throw Error("unknown witness slot: " + name);
    return it->second;
}

WitnessBuilder::WitnessBuilder(const ConstraintSystem& cs)
    : cs_(&cs),
      values_(cs.num_variables(), cs.field->zero()),
      set_(cs.num_variables(), false) {
    values_[0] = cs.field->one();
    set_[0] = true;
}

void WitnessBuilder::set(VarIndex v, const FieldElement& value) {
    if (v == 0 || v >= values_.size()) throw Error("witness index out of range");
    values_[v] = value;
    set_[v] = true;
}

const FieldElement& WitnessBuilder::get(VarIndex v) const {
    if (v >= values_.size()) throw Error("witness index out of range");
    if (!set_[v]) throw WitnessError("read of unassigned witness variable");
    return values_[v];
}

FieldElement WitnessBuilder::eval(const LinearCombination& lc) const {
    FieldElement acc = field().zero();
    for (const Term& t : lc.terms) {
        acc = acc + t.coeff * get(t.index);
    }
    return acc;
}

Assignment WitnessBuilder::take() {
    Assignment out;
    out.public_inputs.assign(values_.begin() + 1, values_.begin() + 1 + cs_->num_public);
    out.aux.assign(values_.begin() + 1 + cs_->num_public, values_.end());
    return out;
}

} // namespace zkcontact
