#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace boxkf {

enum class ErrorKind {
  NonPositiveSize,
  InvalidDt,
  InvalidArgument,
  DimensionMismatch,
  SingularInnovation,
  OutOfOrderFrame,
  InsufficientSamples,
  ParseError,
  EmptyInput,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
  switch (kind) {
    case ErrorKind::NonPositiveSize: return "NonPositiveSize";
    case ErrorKind::InvalidDt: return "InvalidDt";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularInnovation: return "SingularInnovation";
    case ErrorKind::OutOfOrderFrame: return "OutOfOrderFrame";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers what went wrong.
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string & what)
  : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
  {
  }

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Parse failure in a text input, carrying 1-based line and column (field) numbers.
class ParseError : public Error
{
public:
  ParseError(std::size_t line, std::size_t column, const std::string & what)
  : Error(ErrorKind::ParseError,
      "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
    line_(line), column_(column)
  {
  }

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace boxkf
