#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace endspace {

enum class ErrorCode {
  invalid_argument,
  parse_error,
  validation_error,
  budget_exceeded,
  unreachable_vertex,
  consistency_failure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the text parser; line and column are 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, std::size_t column,
             const std::string& message)
      : Error(code, format(line, column, message)),
        line_(line),
        column_(column),
        detail_(message) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(std::size_t line, std::size_t column,
                            const std::string& message) {
    if (line == 0) return message;
    return "line " + std::to_string(line) + ", column " +
           std::to_string(column) + ": " + message;
  }

  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& message)
      : Error(ErrorCode::budget_exceeded, "budget exceeded: " + message) {}
};

/// Internal invariant violated. Raised instead of returning a wrong answer.
[[noreturn]] void consistency_failure(const std::string& message);

/// Aborts the process; used where the theory guarantees the condition.
[[noreturn]] void contract_violation(const char* expression, const char* file,
                                     int line);

}  // namespace endspace

#define ENDSPACE_ENSURE(cond)                                        \
  do {                                                               \
    if (!(cond))                                                     \
      ::endspace::contract_violation(#cond, __FILE__, __LINE__);     \
  } while (false)
