#pragma once

#include <stdexcept>
#include <string>

namespace psm {

// Bad user-supplied data (unknown identifiers, malformed files, violated
// preconditions of a construction).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A size guard tripped; the request is well-formed but too large for the
// exact algorithms.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// A solver was asked to run outside the regime it is exact for.
struct RegimeError : std::runtime_error {
    explicit RegimeError(const std::string& msg) : std::runtime_error(msg) {}
};

// A condition that exact arithmetic should make impossible. Always a bug.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace psm
