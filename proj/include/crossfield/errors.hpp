#pragma once

#include <stdexcept>
#include <string>

namespace crossfield {

/// Bad input to a public operation (ranges, dimensions, preconditions).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed: factorization, convergence, step-size underflow.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed-form result requested outside its domain of validity.
class UnsupportedConfiguration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Too few levels or samples for a statistic.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The Brody likelihood has no unique maximum (all spacings equal).
class FitDegenerate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An omega vector vanished, so the action-angle frame is undefined.
class DegenerateFrame : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace crossfield
