#pragma once

#include <stdexcept>
#include <string>

namespace creativity {

// Base for every error the library raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class IntegrityError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class ImputationError : public Error {
public:
    using Error::Error;
};

class ThresholdError : public Error {
public:
    using Error::Error;
};

// Raised for numerical failures the caller asked to treat as fatal (strict mode).
class NumericError : public Error {
public:
    using Error::Error;
};

// Pearson correlation of a constant series.
class UndefinedCorrelation : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

// Bad command line or config; the CLI exits with status 1.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace creativity
