#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace ymwh {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller (bad parameter,
/// integer coupling where it is excluded, too few samples, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The numerics failed: blowup, step-size collapse, bracket not found,
/// inconsistent quadratures, unresolved spectra.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NoSuchSolutionError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class DomainError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class InsufficientDataError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class InsufficientOscillationError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class NotSeparatingError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class BracketFailureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InconsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ResolutionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StiffnessError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ScalingUndefinedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Nonfinite state encountered while integrating; `last_valid` is the last
/// radius (static problems) or time (evolution) with a finite state.
class BlowupError : public NumericalError {
public:
    BlowupError(const std::string& what, double last_valid)
        : NumericalError(what), last_valid_(last_valid) {}
    double last_valid() const noexcept { return last_valid_; }

private:
    double last_valid_;
};

// Non-fatal diagnostics (unresolved coefficient tails and similar). The
// default handler writes to stderr.
using WarningHandler = std::function<void(const std::string&)>;

WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace ymwh
