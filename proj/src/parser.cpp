// Recursive-descent parser for the exprlang grammar:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ['-'] atom ['^' exponent]
//   atom   := number | ident | func '(' expr ')' | '(' expr ')'
//   exponent := ['-'] number | '(' ['-'] number ')'
//
// A leading '-' directly before a literal without an exponent folds into a
// negative constant; otherwise it produces a negation node.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include "oneill/errors.hpp"
#include "oneill/expr.hpp"

namespace oneill {

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::span<std::string const> vars)
      : text_(text), vars_(vars) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(std::string const& what) const {
    if (pos_ >= text_.size()) throw ParseError(what + " (end of input)", pos_);
    throw ParseError(what + " '" + text_[pos_] + "'", pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::make_binary(Op::kAdd, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::make_binary(Op::kSub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::make_binary(Op::kMul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = Expr::make_binary(Op::kDiv, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    bool const negate = accept('-');
    bool const literal = std::isdigit(static_cast<unsigned char>(peek())) ||
                         peek() == '.';
    Expr base = parse_atom();
    if (accept('^')) {
      base = Expr::make_pow(base, parse_exponent());
    } else if (negate && literal) {
      return Expr::constant(-base.value());
    }
    return negate ? Expr::make_unary(Op::kNeg, base) : base;
  }

  double parse_exponent() {
    bool const paren = accept('(');
    bool const negative = accept('-');
    skip_space();
    double const v = parse_number();
    if (paren && !accept(')')) fail("expected ')'");
    return negative ? -v : v;
  }

  double parse_number() {
    std::size_t const start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.')) {
      ++pos_;
    }
    // Optional exponent part, only when followed by digits.
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      }
    }
    if (start == pos_) fail("expected number");
    double v = 0.0;
    auto const [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  Expr parse_atom() {
    char const c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return Expr::constant(parse_number());
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t const start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      std::string const ident(text_.substr(start, pos_ - start));
      if (auto const op = function_op(ident); op && peek() == '(') {
        accept('(');
        Expr arg = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return Expr::make_unary(*op, arg);
      }
      if (std::find(vars_.begin(), vars_.end(), ident) == vars_.end()) {
        throw ParseError("undeclared variable `" + ident + "`", start);
      }
      return Expr::variable(ident);
    }
    if (accept('(')) {
      Expr e = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected character");
  }

  static std::optional<Op> function_op(std::string const& name) {
    if (name == "sin") return Op::kSin;
    if (name == "cos") return Op::kCos;
    if (name == "tan") return Op::kTan;
    if (name == "exp") return Op::kExp;
    if (name == "log") return Op::kLog;
    if (name == "sqrt") return Op::kSqrt;
    return std::nullopt;
  }

  std::string_view text_;
  std::span<std::string const> vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, std::span<std::string const> vars) {
  return Parser(text, vars).parse_all();
}

Expr parse(std::string_view text, std::initializer_list<std::string> vars) {
  std::vector<std::string> const v(vars);
  return parse(text, std::span<std::string const>(v));
}

}  // namespace oneill
