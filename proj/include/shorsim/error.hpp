#pragma once

#include <stdexcept>
#include <string>

namespace shorsim {

/// Precondition violated by caller-supplied data.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The target is prime; there is no nontrivial factorization to find.
class NothingToFactor : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// A configured size guard (register width, circuit width, byte count) was exceeded.
class ResourceLimit : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace shorsim
