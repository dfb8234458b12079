#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace dmlkit {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Parse,
  Transport,
  Protocol,
  Validation,
  NotFound,
  Internal,
};

/// Base of every exception thrown by the core library. The C API maps
/// kind() onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error(ErrorKind::InvalidArgument, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::Io, message) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::Validation, message) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : Error(ErrorKind::Parse,
              line == 0 ? message
                        : message + " (line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace dmlkit
