#pragma once

#include <stdexcept>
#include <string>

namespace fspde {

/// Argument outside the mathematical domain of an operation (t <= 0, x = 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Array length does not match the grid it is used with.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A time integrator produced a growing mode, NaN or overflow.
class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incomplete run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fspde
