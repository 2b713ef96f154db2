#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treeseq {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor shapes do not conform for the requested operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A precondition on configuration or data was violated.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a structural invariant (e.g. a dependency graph that is not a tree).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// NaN/infinity encountered, or a numeric check failed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace treeseq
