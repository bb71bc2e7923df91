#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace blowup {

/// Input outside the mathematical domain of an operation (R <= 1, t past
/// blow-up, ln of a non-positive value, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A closed-form level that exceeds the representable double range. Kept
/// apart from DomainError: overflow is not a finite-time singularity.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Failure of a numerical integration: step-size underflow without a
/// threshold crossing, or a non-finite derivative.
class IntegrationError : public std::runtime_error {
 public:
  enum class Kind { kStiffness, kField, kStepLimit };

  IntegrationError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Too few usable samples for a statistical fit.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in growth-law text, with 1-based line/column of the
/// offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column,
             std::string token)
      : std::runtime_error(format(message, line, column, token)),
        line_(line),
        column_(column),
        token_(std::move(token)) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }
  [[nodiscard]] const std::string& token() const noexcept { return token_; }

 private:
  static std::string format(const std::string& message, std::size_t line,
                            std::size_t column, const std::string& token) {
    return std::to_string(line) + ":" + std::to_string(column) + ": " +
           message + (token.empty() ? std::string(" at end of input")
                                    : " near '" + token + "'");
  }

  std::size_t line_;
  std::size_t column_;
  std::string token_;
};

/// A free name in an expression that is neither a parameter nor a state
/// variable.
class BindError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace blowup
