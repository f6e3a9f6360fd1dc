#pragma once

#include <stdexcept>
#include <string>

namespace qhub {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (horizon not in set, empty sample, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed input data. `line` is 1-based, 0 when the problem is not tied to a line.
class InputError : public Error {
public:
    InputError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Inconsistent data discovered while combining inputs (round-set mismatch, zero benchmark score).
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace qhub
