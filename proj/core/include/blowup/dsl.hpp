#pragma once

// Text form of growth laws and coupled systems.
//
//   system   := equation (";" equation)* [";"]
//   equation := "d" IDENT "=" expr
//   expr     := term (("+" | "-") term)*
//   term     := factor (("*" | "/") factor)*
//   factor   := ["-"] power
//   power    := atom ["^" factor]
//   atom     := NUMBER | IDENT | ("ln" | "exp") "(" expr ")" | "(" expr ")"
//
// "-A^2" is -(A^2) and "2^3^2" is 2^(3^2). Trees are immutable and may be
// shared between threads.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "blowup/growth_law.hpp"
#include "blowup/ode.hpp"
#include "blowup/sde.hpp"

namespace blowup::dsl {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Number {
  double value = 0.0;
};
struct Name {
  std::string id;
};
struct Negate {
  ExprPtr operand;
};
struct Binary {
  char op = '+';  // one of + - * / ^
  ExprPtr lhs;
  ExprPtr rhs;
};
enum class Function { kLn, kExp };
struct Call {
  Function fn = Function::kLn;
  ExprPtr arg;
};

struct Expr {
  std::variant<Number, Name, Negate, Binary, Call> node;
};

/// Structural equality (numbers compare by value).
bool operator==(const Expr& a, const Expr& b);

using Bindings = std::map<std::string, double, std::less<>>;

struct Equation {
  std::string variable;
  ExprPtr rate;
  /// 1-based source line of the equation.
  std::size_t line = 1;
};

struct SystemSpec {
  /// In declaration order.
  std::vector<Equation> equations;
  Bindings parameters;
  Bindings initial;

  [[nodiscard]] std::vector<std::string> variables() const;
};

/// Throws ParseError.
[[nodiscard]] ExprPtr parse_expression(std::string_view text);
/// Throws ParseError, also for a second equation for the same variable.
[[nodiscard]] SystemSpec parse_system(std::string_view text);
/// A system when the text starts with "dX =", an expression otherwise.
[[nodiscard]] std::variant<SystemSpec, ExprPtr> parse(std::string_view text);

/// Fully parenthesised text that parses back to an equal tree.
[[nodiscard]] std::string to_string(const Expr& expr);

/// Sorted distinct names.
[[nodiscard]] std::vector<std::string> free_names(const Expr& expr);

/// Throws BindError for an unbound name and DomainError for ln of a
/// non-positive value or division by zero.
[[nodiscard]] double evaluate(const Expr& expr, const Bindings& bindings);

/// Postfix program with parameters folded in and the remaining names
/// mapped to slots.
class CompiledExpr {
 public:
  /// Names in `slots` are read from the evaluation span; every other name
  /// must be in `constants` (BindError otherwise).
  CompiledExpr(const ExprPtr& expr, const std::vector<std::string>& slots,
               const Bindings& constants, std::string context = {});

  /// Same errors as evaluate(), prefixed with the context.
  [[nodiscard]] double operator()(std::span<const double> slots) const;

 private:
  enum class Op { kPush, kLoad, kNeg, kAdd, kSub, kMul, kDiv, kPow, kLn, kExp };
  struct Instr {
    Op op;
    double value = 0.0;
    std::size_t slot = 0;
    const Expr* source = nullptr;
  };

  void emit(const Expr& expr, const std::vector<std::string>& slots,
            const Bindings& constants, std::size_t depth);

  ExprPtr expr_;
  std::vector<Instr> code_;
  std::size_t max_depth_ = 0;
  std::string context_;
};

/// Field over the declared variables with spec.parameters bound. Names that
/// are neither raise BindError.
[[nodiscard]] VectorField to_field(const SystemSpec& spec);

/// Scalar law F(A) from an expression in `variable` or a one-equation
/// system.
[[nodiscard]] GrowthLaw growth_law_from_dsl(std::string_view text,
                                            const Bindings& parameters = {},
                                            const std::string& variable = "A");

/// Drift and diffusion expressions in `variable`.
[[nodiscard]] StochasticModel stochastic_model_from_dsl(
    std::string_view drift, std::string_view diffusion,
    const Bindings& parameters = {}, const std::string& variable = "A");

}  // namespace blowup::dsl
