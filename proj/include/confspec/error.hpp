#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace confspec {

enum class ErrorKind {
  InvalidInput,
  SingularSupport,
  SingularCovariance,
  ZeroRegressionVector,
  ConstantColumn,
  ParseError,
  OutOfDomain,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Process exit code for an error surfaced by the CLI:
// 2 input error, 3 numerical error.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                         std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace confspec
