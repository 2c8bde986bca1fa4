#pragma once

#include <stdexcept>
#include <string>

namespace drsplit {

/// Caller misuse: mismatched dimensions, invalid parameters, malformed specs.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A point lies outside the domain of a set-valued operator.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An inner iterative solver missed its residual target within its budget.
class NonconvergenceError : public std::runtime_error {
public:
    NonconvergenceError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_residual(achieved) {}
    double achieved_residual;
};

/// A stated pre- or postcondition failed at runtime.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A problem generator could not produce a valid instance.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Config file parse or validation failure; the message names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace drsplit
