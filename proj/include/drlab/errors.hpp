#pragma once

#include <stdexcept>
#include <string>

namespace drlab {

/// Evaluation outside the domain of a driver function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A root finder or iteration failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or a violated precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed configuration (driver spec, config file, CLI flags).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace drlab
