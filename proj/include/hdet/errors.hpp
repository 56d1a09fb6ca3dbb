#pragma once

#include <stdexcept>
#include <string>

namespace hdet {

// Base for all library errors. The CLI maps ConfigError/IoError/ParseError to
// exit code 2 (usage/config) and everything else to exit code 1 (runtime).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand shapes disagree. Message names both shapes.
struct ShapeError : Error {
    using Error::Error;
};

// Invalid configuration value (rate >= 1, lr <= 0, bad flag combination, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Non-finite value where a finite one is required (loss, gradient, input).
struct NumericError : Error {
    using Error::Error;
};

// Operation called out of sequence (e.g. backward without a forward cache).
struct StateError : Error {
    using Error::Error;
};

// Malformed input data. Message carries a line/row number where applicable.
struct ParseError : Error {
    using Error::Error;
};

// Checkpoint file is missing, truncated, corrupt, or version-incompatible.
struct CheckpointError : Error {
    using Error::Error;
};

// Filesystem problem (missing path, unwritable directory).
struct IoError : Error {
    using Error::Error;
};

// Caller violated a documented precondition (empty sequence, ...).
struct ContractError : Error {
    using Error::Error;
};

// Translation backend failure; carries the pivot language and example id when known.
struct AugmentError : Error {
    AugmentError(const std::string& msg, std::string pivot_lang = {}, std::string example = {})
        : Error(msg), pivot(std::move(pivot_lang)), example_id(std::move(example)) {}
    std::string pivot;
    std::string example_id;
};

}  // namespace hdet
