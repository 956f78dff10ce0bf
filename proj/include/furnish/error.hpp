#pragma once

#include <stdexcept>
#include <string>

namespace furnish {

/// Bad input: malformed files, failed preconditions, invalid configuration.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while running: external generator faults, numerical breakdowns.
class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace furnish
