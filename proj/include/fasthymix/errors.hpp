#pragma once

#include <stdexcept>
#include <string>

namespace fasthymix {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid user-supplied configuration (unknown case id, bad denoiser name, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A computation could not produce a finite, well-defined result.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Statistic requested on an input without spread (zero variance).
class DegenerateInputError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// EM could not fit a mixture after all restarts.
class FitFailureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Fewer usable samples than the requested model needs.
class InsufficientDataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Failure inside one pipeline stage; `stage()` names it and `cause()`
/// keeps the category of the underlying error.
class StageError : public Error {
public:
    enum class Cause { config, numerical, other };

    StageError(std::string stage, const std::string& what, Cause cause)
        : Error(stage + ": " + what), stage_(std::move(stage)), cause_(cause) {}

    const std::string& stage() const noexcept { return stage_; }
    Cause cause() const noexcept { return cause_; }

private:
    std::string stage_;
    Cause cause_;
};

}  // namespace fasthymix
