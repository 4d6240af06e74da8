#pragma once

#include <stdexcept>
#include <string>
#include <vector>
#include <complex>

namespace scaletrack {

/// Caller passed data that violates an operation's preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A feature provider was asked for something its descriptor does not offer.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An external feature provider failed or could not be reached.
class ProviderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dataset files are missing or malformed.
class IngestionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A correlation response carried no usable peak (e.g. all zeros).
class DegenerateResponse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver diverged. Carries the last iterate so callers can
/// decide whether to keep it.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::vector<std::complex<double>> last)
        : std::runtime_error(what), last_iterate(std::move(last)) {}

    std::vector<std::complex<double>> last_iterate;
};

} // namespace scaletrack
