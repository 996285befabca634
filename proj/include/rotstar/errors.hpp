#pragma once

#include <stdexcept>
#include <string>

namespace rotstar {

/// Base class of every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (negative density, a <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class NumericsError : public Error {
public:
    using Error::Error;
};

/// The radial profile never crossed zero before the integration limit.
class SurfaceNotFound : public NumericsError {
public:
    SurfaceNotFound(double r_max, const std::string& diagnostic)
        : NumericsError("surface not found before r_max=" + std::to_string(r_max) + ": " + diagnostic),
          r_max_(r_max) {}
    double r_max() const noexcept { return r_max_; }

private:
    double r_max_;
};

class StiffnessFailure : public NumericsError {
public:
    using NumericsError::NumericsError;
};

/// A stored profile is too coarse to be interpolated at the accuracy an operation needs.
class ResolutionError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

/// Two independent routes to the same quantity disagree.
class ConsistencyError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

/// The density support reached the edge of the computational grid.
class DomainOverflow : public NumericsError {
public:
    using NumericsError::NumericsError;
};

class MassUnreachable : public NumericsError {
public:
    using NumericsError::NumericsError;
};

/// The O_N guard alpha + kappa^2 sup j < -1/N failed.
class GuardViolation : public NumericsError {
public:
    using NumericsError::NumericsError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace rotstar
