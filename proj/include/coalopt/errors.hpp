#pragma once

#include <stdexcept>
#include <string>

namespace coalopt {

/// Rejected input, configuration, or precondition. Raised before any
/// expensive computation starts; the message names the offending field.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A requested combinatorial size exceeds a configured cap.
class CapacityError : public ValidationError {
public:
    explicit CapacityError(const std::string& msg) : ValidationError(msg) {}
};

/// A solver produced a non-finite value or failed to converge. The message
/// identifies the failing step so runs can be reproduced.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace coalopt
