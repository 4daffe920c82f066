// errors.hpp
// Exception types shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace statarb {

/// Caller passed something that violates a documented precondition
/// (bad dimensions, non-finite entries, out-of-range time, ...).
class InvalidInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A matrix required to be positive semi-definite is not.
class NotPsdError : public InvalidInputError {
public:
    using InvalidInputError::InvalidInputError;
};

/// Numerical degeneracy at run time (singular system, failed factorization).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An ODE integration blew up; records where.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& message, double blow_up_time)
        : NumericalError(message), blow_up_time_(blow_up_time) {}

    double blow_up_time() const { return blow_up_time_; }

private:
    double blow_up_time_;
};

}  // namespace statarb
