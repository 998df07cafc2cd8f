#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace confound {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or argument is outside its admissible domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The design matrix does not have full column rank.
class SingularDesignError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure that is not a rank problem (no converged fits, etc.).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class UndefinedCorrelationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed text input. `line` and `column` are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(format(what, line, column)), message_(what), line_(line), column_(column) {}

  /// The message without the position prefix.
  const std::string& message() const noexcept { return message_; }

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ", ";
    if (column > 0) out += "column " + std::to_string(column) + ": ";
    return out + what;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// A data cell could not be ingested. `row` is the 1-based data row (header excluded).
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t row, std::string column)
      : Error("row " + std::to_string(row) + ", column " + column + ": " + what),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace confound
