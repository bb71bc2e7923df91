#include "blowup/dsl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <utility>

#include "blowup/error.hpp"

namespace blowup::dsl {
namespace {

// ---------------------------------------------------------------- lexer

enum class Tok { kNumber, kIdent, kSymbol, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : src_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token tok;
      tok.line = line_;
      tok.column = column_;
      if (pos_ >= src_.size()) {
        out.push_back(tok);
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number(tok);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        tok.kind = Tok::kIdent;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_')) {
          tok.text += advance();
        }
      } else if (std::string_view("+-*/^()=;").find(c) != std::string_view::npos) {
        tok.kind = Tok::kSymbol;
        tok.text = std::string(1, advance());
      } else {
        throw ParseError("unexpected character", tok.line, tok.column,
                         std::string(1, c));
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      advance();
    }
  }

  bool digit_at(std::size_t i) const {
    return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
  }

  void lex_number(Token& tok) {
    tok.kind = Tok::kNumber;
    const std::size_t begin = pos_;
    while (digit_at(pos_)) advance();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      while (digit_at(pos_)) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (digit_at(look)) {
        while (pos_ < look) advance();
        while (digit_at(pos_)) advance();
      }
    }
    tok.text = std::string(src_.substr(begin, pos_ - begin));
    const auto res = std::from_chars(tok.text.data(),
                                     tok.text.data() + tok.text.size(),
                                     tok.number);
    if (res.ec != std::errc() || !std::isfinite(tok.number)) {
      throw ParseError("number out of range", tok.line, tok.column, tok.text);
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// --------------------------------------------------------------- parser

ExprPtr make(auto node) {
  return std::make_shared<const Expr>(Expr{std::move(node)});
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  bool starts_with_equation() const {
    return toks_.size() > 2 && is_equation_head(0);
  }

  ExprPtr expression_only() {
    ExprPtr e = expr();
    expect_end();
    return e;
  }

  SystemSpec system() {
    SystemSpec spec;
    std::set<std::string> seen;
    for (;;) {
      const Token& head = peek();
      if (!is_equation_head(pos_)) {
        throw ParseError("expected an equation 'dX = ...'", head.line,
                         head.column, head.text);
      }
      Equation eq;
      eq.variable = head.text.substr(1);
      eq.line = head.line;
      if (!seen.insert(eq.variable).second) {
        throw ParseError("duplicate equation for " + eq.variable, head.line,
                         head.column, head.text);
      }
      pos_ += 2;
      eq.rate = expr();
      spec.equations.push_back(std::move(eq));
      if (accept(";")) {
        if (peek().kind == Tok::kEnd) break;
        continue;
      }
      if (peek().kind == Tok::kEnd) break;
      throw ParseError("expected ';' or end of input", peek().line,
                       peek().column, peek().text);
    }
    return spec;
  }

 private:
  bool is_equation_head(std::size_t i) const {
    return i + 1 < toks_.size() && toks_[i].kind == Tok::kIdent &&
           toks_[i].text.size() > 1 && toks_[i].text[0] == 'd' &&
           toks_[i + 1].kind == Tok::kSymbol && toks_[i + 1].text == "=";
  }

  const Token& peek() const { return toks_[pos_]; }

  bool accept(std::string_view symbol) {
    if (peek().kind == Tok::kSymbol && peek().text == symbol) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(std::string_view symbol) {
    if (!accept(symbol)) {
      throw ParseError("expected '" + std::string(symbol) + "'", peek().line,
                       peek().column, peek().text);
    }
  }

  void expect_end() {
    if (peek().kind != Tok::kEnd) {
      throw ParseError("unexpected token", peek().line, peek().column,
                       peek().text);
    }
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      if (accept("+")) {
        lhs = make(Binary{'+', lhs, term()});
      } else if (accept("-")) {
        lhs = make(Binary{'-', lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    for (;;) {
      if (accept("*")) {
        lhs = make(Binary{'*', lhs, factor()});
      } else if (accept("/")) {
        lhs = make(Binary{'/', lhs, factor()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr factor() {
    if (accept("-")) return make(Negate{power()});
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (accept("^")) return make(Binary{'^', base, factor()});
    return base;
  }

  ExprPtr atom() {
    const Token tok = peek();
    switch (tok.kind) {
      case Tok::kNumber:
        ++pos_;
        return make(Number{tok.number});
      case Tok::kIdent:
        ++pos_;
        if (tok.text == "ln" || tok.text == "exp") {
          expect("(");
          ExprPtr arg = expr();
          expect(")");
          return make(Call{tok.text == "ln" ? Function::kLn : Function::kExp,
                           std::move(arg)});
        }
        return make(Name{tok.text});
      case Tok::kSymbol:
        if (accept("(")) {
          ExprPtr inner = expr();
          expect(")");
          return inner;
        }
        break;
      case Tok::kEnd:
        break;
    }
    throw ParseError("expected a number, name, function or '('", tok.line,
                     tok.column, tok.text);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ------------------------------------------------------------ printing

std::string number_text(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

const char* function_name(Function fn) {
  return fn == Function::kLn ? "ln" : "exp";
}

template <class... F>
struct Overload : F... {
  using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

void collect_names(const Expr& e, std::set<std::string>& out) {
  std::visit(Overload{
                 [](const Number&) {},
                 [&](const Name& n) { out.insert(n.id); },
                 [&](const Negate& n) { collect_names(*n.operand, out); },
                 [&](const Binary& b) {
                   collect_names(*b.lhs, out);
                   collect_names(*b.rhs, out);
                 },
                 [&](const Call& c) { collect_names(*c.arg, out); },
             },
             e.node);
}

double apply_binary(char op, double a, double b, const Expr& source,
                    const std::string& context) {
  switch (op) {
    case '+':
      return a + b;
    case '-':
      return a - b;
    case '*':
      return a * b;
    case '/':
      if (b == 0.0) {
        throw DomainError(context + "division by zero: " + to_string(source));
      }
      return a / b;
    default:
      return std::pow(a, b);
  }
}

double apply_call(Function fn, double x, const Expr& source,
                  const std::string& context) {
  if (fn == Function::kExp) return std::exp(x);
  if (!(x > 0.0)) {
    throw DomainError(context + "ln of non-positive value " + number_text(x) +
                      " in " + to_string(source));
  }
  return std::log(x);
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      Overload{
          [&](const Number& x) { return x.value == std::get<Number>(b.node).value; },
          [&](const Name& x) { return x.id == std::get<Name>(b.node).id; },
          [&](const Negate& x) {
            return *x.operand == *std::get<Negate>(b.node).operand;
          },
          [&](const Binary& x) {
            const auto& y = std::get<Binary>(b.node);
            return x.op == y.op && *x.lhs == *y.lhs && *x.rhs == *y.rhs;
          },
          [&](const Call& x) {
            const auto& y = std::get<Call>(b.node);
            return x.fn == y.fn && *x.arg == *y.arg;
          },
      },
      a.node);
}

std::vector<std::string> SystemSpec::variables() const {
  std::vector<std::string> out;
  out.reserve(equations.size());
  for (const auto& eq : equations) out.push_back(eq.variable);
  return out;
}

ExprPtr parse_expression(std::string_view text) {
  return Parser(text).expression_only();
}

SystemSpec parse_system(std::string_view text) { return Parser(text).system(); }

std::variant<SystemSpec, ExprPtr> parse(std::string_view text) {
  Parser p(text);
  if (p.starts_with_equation()) return p.system();
  return p.expression_only();
}

std::string to_string(const Expr& expr) {
  return std::visit(
      Overload{
          [](const Number& n) { return number_text(n.value); },
          [](const Name& n) { return n.id; },
          [](const Negate& n) { return "(-" + to_string(*n.operand) + ")"; },
          [](const Binary& b) {
            return "(" + to_string(*b.lhs) + " " + std::string(1, b.op) + " " +
                   to_string(*b.rhs) + ")";
          },
          [](const Call& c) {
            return std::string(function_name(c.fn)) + "(" + to_string(*c.arg) +
                   ")";
          },
      },
      expr.node);
}

std::vector<std::string> free_names(const Expr& expr) {
  std::set<std::string> names;
  collect_names(expr, names);
  return {names.begin(), names.end()};
}

double evaluate(const Expr& expr, const Bindings& bindings) {
  return std::visit(
      Overload{
          [](const Number& n) { return n.value; },
          [&](const Name& n) {
            const auto it = bindings.find(n.id);
            if (it == bindings.end()) throw BindError("unbound name '" + n.id + "'");
            return it->second;
          },
          [&](const Negate& n) { return -evaluate(*n.operand, bindings); },
          [&](const Binary& b) {
            const double lhs = evaluate(*b.lhs, bindings);
            const double rhs = evaluate(*b.rhs, bindings);
            return apply_binary(b.op, lhs, rhs, expr, "");
          },
          [&](const Call& c) {
            return apply_call(c.fn, evaluate(*c.arg, bindings), expr, "");
          },
      },
      expr.node);
}

// ------------------------------------------------------------ compiled

CompiledExpr::CompiledExpr(const ExprPtr& expr,
                           const std::vector<std::string>& slots,
                           const Bindings& constants, std::string context)
    : expr_(expr), context_(std::move(context)) {
  if (!expr_) throw DomainError("CompiledExpr: empty expression");
  if (!context_.empty()) context_ += ": ";
  emit(*expr_, slots, constants, 1);
}

void CompiledExpr::emit(const Expr& expr, const std::vector<std::string>& slots,
                        const Bindings& constants, std::size_t depth) {
  max_depth_ = std::max(max_depth_, depth);
  std::visit(
      Overload{
          [&](const Number& n) { code_.push_back({Op::kPush, n.value, 0, &expr}); },
          [&](const Name& n) {
            const auto s = std::find(slots.begin(), slots.end(), n.id);
            if (s != slots.end()) {
              code_.push_back({Op::kLoad, 0.0,
                               static_cast<std::size_t>(s - slots.begin()), &expr});
              return;
            }
            const auto c = constants.find(n.id);
            if (c == constants.end()) {
              throw BindError(context_ + "unbound name '" + n.id + "'");
            }
            code_.push_back({Op::kPush, c->second, 0, &expr});
          },
          [&](const Negate& n) {
            emit(*n.operand, slots, constants, depth);
            code_.push_back({Op::kNeg, 0.0, 0, &expr});
          },
          [&](const Binary& b) {
            emit(*b.lhs, slots, constants, depth);
            emit(*b.rhs, slots, constants, depth + 1);
            Op op = Op::kPow;
            switch (b.op) {
              case '+': op = Op::kAdd; break;
              case '-': op = Op::kSub; break;
              case '*': op = Op::kMul; break;
              case '/': op = Op::kDiv; break;
              default: break;
            }
            code_.push_back({op, 0.0, 0, &expr});
          },
          [&](const Call& c) {
            emit(*c.arg, slots, constants, depth);
            code_.push_back({c.fn == Function::kLn ? Op::kLn : Op::kExp, 0.0, 0,
                             &expr});
          },
      },
      expr.node);
}

double CompiledExpr::operator()(std::span<const double> slots) const {
  constexpr std::size_t kInline = 32;
  std::array<double, kInline> small{};
  std::vector<double> big;
  double* stack = small.data();
  if (max_depth_ > kInline) {
    big.resize(max_depth_);
    stack = big.data();
  }
  std::size_t top = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::kPush:
        stack[top++] = in.value;
        break;
      case Op::kLoad:
        stack[top++] = slots[in.slot];
        break;
      case Op::kNeg:
        stack[top - 1] = -stack[top - 1];
        break;
      case Op::kAdd:
        --top;
        stack[top - 1] += stack[top];
        break;
      case Op::kSub:
        --top;
        stack[top - 1] -= stack[top];
        break;
      case Op::kMul:
        --top;
        stack[top - 1] *= stack[top];
        break;
      case Op::kDiv:
        --top;
        stack[top - 1] =
            apply_binary('/', stack[top - 1], stack[top], *in.source, context_);
        break;
      case Op::kPow:
        --top;
        stack[top - 1] = std::pow(stack[top - 1], stack[top]);
        break;
      case Op::kLn:
        stack[top - 1] =
            apply_call(Function::kLn, stack[top - 1], *in.source, context_);
        break;
      case Op::kExp:
        stack[top - 1] = std::exp(stack[top - 1]);
        break;
    }
  }
  return stack[0];
}

// -------------------------------------------------------------- bridges

VectorField to_field(const SystemSpec& spec) {
  if (spec.equations.empty()) throw DomainError("to_field: no equations");
  const std::vector<std::string> vars = spec.variables();
  for (const auto& v : vars) {
    if (spec.parameters.count(v) != 0) {
      throw BindError("to_field: '" + v +
                      "' is both a state variable and a parameter");
    }
  }
  std::vector<CompiledExpr> rates;
  rates.reserve(vars.size());
  for (const auto& eq : spec.equations) {
    rates.emplace_back(eq.rate, vars, spec.parameters,
                       "line " + std::to_string(eq.line) + ", d" + eq.variable);
  }
  return VectorField(
      vars.size(),
      [rates = std::move(rates)](std::span<const double> state,
                                 std::span<double> out) {
        for (std::size_t i = 0; i < rates.size(); ++i) out[i] = rates[i](state);
      },
      vars);
}

namespace {

ExprPtr scalar_expression(std::string_view text, const std::string& variable) {
  auto parsed = parse(text);
  if (auto* expr = std::get_if<ExprPtr>(&parsed)) return *expr;
  const SystemSpec& spec = std::get<SystemSpec>(parsed);
  if (spec.equations.size() != 1 || spec.equations[0].variable != variable) {
    throw BindError("expected a single equation for d" + variable);
  }
  return spec.equations[0].rate;
}

}  // namespace

GrowthLaw growth_law_from_dsl(std::string_view text, const Bindings& parameters,
                              const std::string& variable) {
  const ExprPtr expr = scalar_expression(text, variable);
  CompiledExpr compiled(expr, {variable}, parameters);
  return GrowthLaw(to_string(*expr), [compiled = std::move(compiled)](double A) {
    return compiled(std::span<const double>(&A, 1));
  });
}

StochasticModel stochastic_model_from_dsl(std::string_view drift,
                                          std::string_view diffusion,
                                          const Bindings& parameters,
                                          const std::string& variable) {
  const GrowthLaw a = growth_law_from_dsl(drift, parameters, variable);
  const GrowthLaw b = growth_law_from_dsl(diffusion, parameters, variable);
  StochasticModel model;
  model.drift = a.rate();
  model.diffusion = b.rate();
  model.label = ModelLabel::kCustom;
  model.description = "d" + variable + " = " + a.name() + " dt + " + b.name() +
                      " dW";
  return model;
}

}  // namespace blowup::dsl
