#pragma once

#include <stdexcept>
#include <string>

namespace ergoswitch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or a malformed model/config.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A coefficient or state evaluated to NaN/inf.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// An iterative solver failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

}  // namespace ergoswitch
