#pragma once

#include <stdexcept>
#include <string>

namespace noon {

/// Invalid input or physically inconsistent configuration (CLI exit code 1).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to converge or found no solution (CLI exit code 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace noon
