#pragma once

#include <stdexcept>
#include <string>

namespace gof {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (bad argument, out-of-domain point).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed: non-convergence, NaN from a user function,
/// an extremum the partition missed.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A density failed validation (negative values, wrong total mass).
class DensityError : public Error {
public:
    DensityError(const std::string& what, double mass = 0.0) : Error(what), mass_(mass) {}
    double mass() const noexcept { return mass_; }

private:
    double mass_;
};

/// Malformed input file or spec; `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace gof
