#pragma once

#include <stdexcept>
#include <string>

namespace mixar {

/// Bad arguments or malformed data (wrong lengths, non-finite values).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The error variance is infinite (nu <= 2), so the classical information
/// matrix does not exist.
class InfiniteVarianceError : public DomainError {
public:
    explicit InfiniteVarianceError(const std::string& what) : DomainError(what) {}
};

/// Residual or sample spread collapsed to zero.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical procedure could not produce a usable answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mixar
