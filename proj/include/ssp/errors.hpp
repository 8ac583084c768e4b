#pragma once

#include <stdexcept>
#include <string>

namespace ssp {

// Base of everything the library throws. Callers that only care about
// "something went wrong in the model" catch this one.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside its mathematical domain (alpha > 1, p_eps = 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Model failed validation (bad probabilities, malformed file).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Policy enumeration would exceed the configured cap.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Exact evaluation requested for an improper policy.
class PropernessError : public Error {
public:
    using Error::Error;
};

/// A modelling assumption (all policies proper, Assumption-3 style
/// divergence of improper policies, ...) does not hold.
class AssumptionError : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration hit its cap without meeting the tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or incomplete run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Case the library deliberately does not decide (e.g. divergence of
/// improper policies under sign-changing costs).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

} // namespace ssp
