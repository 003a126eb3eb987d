// Exception types shared across the toolkit.
#pragma once

#include <stdexcept>
#include <string>

namespace qtel {

// Invalid argument values (bad site index, out-of-range parameter, ...).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Register or bath exceeds the dense-representation cap.
struct CapacityError : std::length_error {
    using std::length_error::length_error;
};

// Channel cannot be split into orthogonal Bob branches.
struct DecompositionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Protocol cannot run on the given channel (zero-norm branch, ...).
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or unreadable input file.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qtel
