#pragma once

#include <stdexcept>
#include <string>

namespace swrhc {

/// Raised when a caller violates a precondition (bad sizes, out-of-range
/// parameters, malformed configuration).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization or solve breaks down, or when an iterate
/// stops being finite.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace swrhc
