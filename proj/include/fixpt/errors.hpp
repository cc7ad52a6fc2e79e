#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fixpt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An approximation certified that an argument lies outside an operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions disagree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Input data contradicts a promise (crossing bounds, empty sets, overlapping
/// enumerations, ...).
class InconsistentInput : public Error {
 public:
  using Error::Error;
};

/// A search ran out of its stage budget before it could answer.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// A scenario or map document failed validation; path locates the offending
/// field, e.g. "map.halfspaces[2].normal".
class SpecError : public Error {
 public:
  SpecError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)), message_(message) {}
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

 private:
  std::string path_;
  std::string message_;
};

}  // namespace fixpt
