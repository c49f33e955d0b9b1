#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zkcontact {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Witness generation hit a value outside a gadget's admissible range.
struct WitnessError : Error {
    using Error::Error;
};

/// The prover declines to emit a proof for an unsatisfied instance.
struct ProveRefused : Error {
    using Error::Error;
};

/// Structured-text or binary parse failure; message carries location context.
struct ParseError : Error {
    using Error::Error;
};

/// Log recovery found a corrupt record before the tail.
struct RecoveryError : Error {
    RecoveryError(const std::string& msg, uint64_t offset)
        : Error(msg + " at offset " + std::to_string(offset)), offset(offset) {}
    uint64_t offset;
};

} // namespace zkcontact
