#pragma once

#include <stdexcept>
#include <string>

namespace vdt {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative inflow,
/// tilt outside [0, 90], degenerate bounds, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or missing argument (missing interpolation axis, bad config).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Euler attitude too close to +-90 deg pitch.
class GimbalLockError : public Error {
public:
    using Error::Error;
};

/// File could not be read or failed schema validation. The message names the
/// offending file and, where relevant, the axis or field.
class LoadError : public Error {
public:
    using Error::Error;
};

/// Surrogate fitting failed (conditioning, underdetermined scaling factors).
class FitError : public Error {
public:
    using Error::Error;
};

/// Socket could not be opened or bound, or a peer is unreachable.
class TransportError : public Error {
public:
    using Error::Error;
};

} // namespace vdt
