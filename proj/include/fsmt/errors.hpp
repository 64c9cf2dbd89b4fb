#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fsmt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed instance or assignment text. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A structurally valid object violates a semantic invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An enumeration oracle or compiler refused an input that is too large.
class LimitExceeded : public Error {
public:
    using Error::Error;
};

/// Diagram compilation produced more nodes than the configured budget.
class NodeBudgetExceeded : public LimitExceeded {
public:
    using LimitExceeded::LimitExceeded;
};

}  // namespace fsmt
