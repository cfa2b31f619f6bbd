#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fishmig {

/// Raised when user-supplied data or settings fail validation.
/// The CLI maps this family to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed record in a text file; carries the 1-based line number.
class ParseError : public InputError {
public:
    ParseError(std::string source, std::size_t line, const std::string& what);

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// Numerical failure inside a computation (non-finite values, divergence).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fishmig
