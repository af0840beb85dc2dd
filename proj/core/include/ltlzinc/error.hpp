#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltlzinc {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations: missing atoms, out-of-domain values,
// unnormalized distributions, bad temperatures and the like.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A configurable size cap was exceeded (DFA states, circuit variables).
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A task specification cannot produce the requested dataset.
class CompileError : public Error {
 public:
  using Error::Error;
};

// Stored artifacts do not match the specification they claim to derive from.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. Line and column are 1-based; zero means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line,
                            std::size_t column) {
    if (line == 0) return what;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

// Grammar violation in LTLf formula text; carries the set of tokens that
// would have been accepted at the failure point.
class SyntaxError : public ParseError {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column,
              std::vector<std::string> expected)
      : ParseError(what, line, column), expected_(std::move(expected)) {}

  const std::vector<std::string>& expected() const noexcept {
    return expected_;
  }

 private:
  std::vector<std::string> expected_;
};

// A character sequence that is not a token of the formula language.
class UnknownTokenError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

// The fuzzy engine produced a belief with zero total mass.
class DegenerateBeliefError : public Error {
 public:
  using Error::Error;
};

}  // namespace ltlzinc
