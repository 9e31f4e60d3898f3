#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace loopcert {

enum class ErrorKind {
  PositionOutOfTerm,
  MalformedContext,
  NotARedex,
  NotParallel,
  ArityMismatch,
  ClosingMismatch,
  VariableRedex,
  ShapeMismatch,
  SyntaxError,
  VariableLhs,
  ExtraRhsVariable,
  RuleIndexOutOfRange,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the documented kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parser failure with a 1-based source location.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace loopcert
