#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctgame {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (bad parameter, non-positive price, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. Carries the 1-based line number of the offending record.
class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string& what)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Experiment configuration that cannot be honoured (weights not summing to one, ...).
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Internal bookkeeping disagrees with itself, e.g. a hit that matches neither boundary.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

/// A bet that could drive capital negative on some path.
class CollateralViolation : public Error {
public:
    using Error::Error;
};

/// A numerical method could not deliver (non-PSD embedding with no fallback, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace ctgame
