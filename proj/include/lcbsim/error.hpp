#pragma once

#include <stdexcept>
#include <string>

namespace lcb {

enum class ErrorKind {
  Argument,
  Parse,
  Validation,
  Io,
  EmptyInput,
  Config,
};

// Base of every exception the core throws. The C API maps `kind()` onto
// lcb_status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& message)
      : Error(ErrorKind::Argument, message) {}
};

// Malformed field in a delimited row. `column` is 1-based; 0 means the row
// as a whole (wrong field count).
class ParseError : public Error {
 public:
  ParseError(int column, const std::string& message)
      : Error(ErrorKind::Parse, message), column_(column) {}

  int column() const noexcept { return column_; }

 private:
  int column_;
};

class ValidationError : public Error {
 public:
  ValidationError(int column, const std::string& message)
      : Error(ErrorKind::Validation, message), column_(column) {}

  int column() const noexcept { return column_; }

 private:
  int column_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::Io, message) {}
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& message)
      : Error(ErrorKind::EmptyInput, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::Config, message) {}
};

}  // namespace lcb
