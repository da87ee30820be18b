// Recursive-descent parser for the metric expression language:
//
//   expr   = term { ("+"|"-") term } ;
//   term   = factor { ("*"|"/") factor } ;
//   factor = unary [ "^" factor ] ;
//   unary  = [ "-" ] base ;
//   base   = NUMBER | IDENT | "(" expr ")" | FUNC "(" expr ")" ;
//   IDENT  = ("x"|"p") DIGITS ;  FUNC = "sqrt"|"exp"|"log"|"sin"|"cos" ;

#include <cctype>
#include <charconv>
#include <string>

#include "cartan/metric.hpp"

namespace cartan {

ParseError::ParseError(ParseErrorKind kind, int line, int column,
                       const std::string& msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + msg),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim, ExprPool& pool)
      : text_(text), dim_(dim), pool_(pool) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ < text_.size()) {
      fail(ParseErrorKind::Syntax,
           std::string("unexpected character '") + text_[pos_] + "'");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(ParseErrorKind kind, const std::string& msg) {
    fail_at(kind, pos_, msg);
  }

  [[noreturn]] void fail_at(ParseErrorKind kind, std::size_t at,
                            const std::string& msg) {
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(kind, line, column, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      fail(ParseErrorKind::Syntax, std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * factor();
      } else if (accept('/')) {
        lhs = lhs / factor();
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    Expr base = unary();
    skip_ws();
    const std::size_t caret = pos_;
    if (!accept('^')) return base;
    Expr exponent = factor();
    if (!base.is_constant() && !exponent.is_constant()) {
      fail_at(ParseErrorKind::NonConstantPower, caret,
              "'^' with non-constant base and non-constant exponent");
    }
    return pow(base, exponent);
  }

  Expr unary() {
    if (accept('-')) return -base();
    return base();
  }

  Expr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail(ParseErrorKind::Syntax, "unexpected end");
    const char c = text_[pos_];
    if (accept('(')) {
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(ParseErrorKind::Syntax, std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [this] {
      std::size_t n = 0;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) fail_at(ParseErrorKind::Syntax, start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        ++pos_;
      }
      if (digits() == 0) pos_ = save;
    }
    double value = 0.0;
    const std::string token(text_.substr(start, pos_ - start));
    try {
      value = std::stod(token);
    } catch (const std::exception&) {
      fail_at(ParseErrorKind::Syntax, start, "malformed number '" + token + "'");
    }
    return pool_.constant(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::string word(text_.substr(start, pos_ - start));
    if (word == "sqrt" || word == "exp" || word == "log" || word == "sin" ||
        word == "cos") {
      expect('(');
      Expr arg = expr();
      expect(')');
      if (word == "sqrt") return sqrt(arg);
      if (word == "exp") return exp(arg);
      if (word == "log") return log(arg);
      if (word == "sin") return sin(arg);
      return cos(arg);
    }
    const bool is_var = word.size() >= 2 && (word[0] == 'x' || word[0] == 'p') &&
                        word.find_first_not_of("0123456789", 1) ==
                            std::string::npos;
    if (!is_var) {
      fail_at(ParseErrorKind::UnknownIdentifier, start,
              "unknown identifier '" + word + "'");
    }
    int index = 0;
    auto [ptr, ec] =
        std::from_chars(word.data() + 1, word.data() + word.size(), index);
    if (ec != std::errc() || index < 1 || index > dim_) {
      fail_at(ParseErrorKind::IndexOutOfRange, start,
              "variable '" + word + "' out of range for dimension " +
                  std::to_string(dim_));
    }
    const int var = (word[0] == 'x' ? 0 : dim_) + index - 1;
    return pool_.variable(var);
  }

  std::string_view text_;
  int dim_;
  ExprPool& pool_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text, int dim, ExprPool& pool) {
  if (pool.num_vars() != 2 * dim) {
    throw std::invalid_argument("pool does not match dimension");
  }
  return Parser(text, dim, pool).parse();
}

}  // namespace cartan
