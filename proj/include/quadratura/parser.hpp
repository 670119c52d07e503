#pragma once

// Recursive-descent parser and printer for the formula language.
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | base ("^" factor)?
//   base   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//
// Unary minus binds looser than "^" (-x^2 is -(x^2)) and tighter than "*".
// "^" is right-associative. Recognized constants: pi, e.

#include <cctype>
#include <charconv>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "quadratura/errors.hpp"
#include "quadratura/expr.hpp"

namespace quadratura {

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, std::string variable)
      : text_(text), variable_(std::move(variable)), fixed_variable_(!variable_.empty()) {}

  Expr run() {
    Expr e = expression();
    skip_space();
    if (pos_ < text_.size()) throw unexpected();
    return e;
  }

 private:
  Expr expression() {
    Expr lhs = term();
    for (;;) {
      skip_space();
      if (accept('+'))
        lhs = Expr::binary(BinaryOp::add, lhs, term());
      else if (accept('-'))
        lhs = Expr::binary(BinaryOp::sub, lhs, term());
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      skip_space();
      if (accept('*'))
        lhs = Expr::binary(BinaryOp::mul, lhs, factor());
      else if (accept('/'))
        lhs = Expr::binary(BinaryOp::div, lhs, factor());
      else
        return lhs;
    }
  }

  Expr factor() {
    skip_space();
    if (accept('-')) return Expr::negate(factor());
    Expr b = base();
    skip_space();
    if (accept('^')) return Expr::binary(BinaryOp::pow, b, factor());
    return b;
  }

  Expr base() {
    skip_space();
    if (pos_ >= text_.size()) throw unexpected();
    const char c = text_[pos_];
    if (is_digit(c) || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    if (accept('(')) {
      Expr e = expression();
      expect(')');
      return e;
    }
    throw unexpected();
  }

  Expr number() {
    const std::size_t start = pos_;
    std::size_t p = pos_;
    while (p < text_.size() && is_digit(text_[p])) ++p;
    bool digits = p > start;
    if (p < text_.size() && text_[p] == '.') {
      ++p;
      const std::size_t frac = p;
      while (p < text_.size() && is_digit(text_[p])) ++p;
      digits = digits || p > frac;
    }
    if (!digits) throw ParseError(ParseError::Kind::syntax, start, "malformed number");
    if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && is_digit(text_[q])) {
        while (q < text_.size() && is_digit(text_[q])) ++q;
        p = q;
      }
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + p, v);
    if (ec == std::errc::result_out_of_range)
      throw ParseError(ParseError::Kind::syntax, start, "number out of range");
    if (ec != std::errc() || ptr != text_.data() + p)
      throw ParseError(ParseError::Kind::syntax, start, "malformed number");
    pos_ = p;
    return Expr::constant(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    skip_space();
    const bool called = pos_ < text_.size() && text_[pos_] == '(';

    std::optional<Function> fn;
    for (const auto& [fname, f] : kFunctionNames)
      if (fname == name) fn = f;

    if (fn) {
      if (!called)
        throw ParseError(ParseError::Kind::syntax, pos_, "expected '(' after '" + name + "'");
      ++pos_;
      return Expr::call(*fn, arguments(start, name));
    }
    if (name == "pi" || name == "e") {
      if (called)
        throw ParseError(ParseError::Kind::arity, start, "constant '" + name + "' takes no arguments");
      return Expr::named_constant(name, name == "pi" ? std::numbers::pi : std::numbers::e);
    }
    if (called)
      throw ParseError(ParseError::Kind::unknown_identifier, start, "unknown function '" + name + "'");
    if (variable_.empty()) variable_ = name;
    if (name != variable_) {
      const std::string expected = fixed_variable_ ? "expected variable '" : "already using variable '";
      throw ParseError(ParseError::Kind::unknown_identifier, start,
                       "'" + name + "' (" + expected + variable_ + "')");
    }
    return Expr::variable(name);
  }

  // Parses the argument list after '(' of a one-argument function.
  Expr arguments(std::size_t at, const std::string& name) {
    skip_space();
    if (accept(')'))
      throw ParseError(ParseError::Kind::arity, at, "'" + name + "' expects 1 argument, got 0");
    Expr arg = expression();
    std::size_t count = 1;
    skip_space();
    while (accept(',')) {
      expression();
      ++count;
      skip_space();
    }
    expect(')');
    if (count != 1)
      throw ParseError(ParseError::Kind::arity, at,
                       "'" + name + "' expects 1 argument, got " + std::to_string(count));
    return arg;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_space();
    if (!accept(c)) {
      if (pos_ >= text_.size())
        throw ParseError(ParseError::Kind::syntax, pos_,
                         std::string("unexpected end of input, expected '") + c + "'");
      throw ParseError(ParseError::Kind::syntax, pos_,
                       std::string("expected '") + c + "', found '" + text_[pos_] + "'");
    }
  }

  ParseError unexpected() const {
    if (pos_ >= text_.size())
      return ParseError(ParseError::Kind::syntax, pos_, "unexpected end of input");
    return ParseError(ParseError::Kind::syntax, pos_,
                      std::string("unexpected '") + text_[pos_] + "'");
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::string variable_;
  bool fixed_variable_;
};

inline int precedence(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::constant: return 5;
    case NodeKind::variable: return 5;
    case NodeKind::call: return 5;
    case NodeKind::negate: return 3;
    case NodeKind::binary:
      switch (e.binary_op()) {
        case BinaryOp::add:
        case BinaryOp::sub: return 1;
        case BinaryOp::mul:
        case BinaryOp::div: return 2;
        case BinaryOp::pow: return 4;
      }
  }
  return 0;
}

inline std::string format_number(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  std::string s(buf, res.ptr);
  // Prefer the shortest spelling when it round-trips.
  const auto shortest = std::to_chars(buf, buf + sizeof buf, v);
  std::string t(buf, shortest.ptr);
  return t.size() < s.size() ? t : s;
}

inline void print(const Expr& e, std::string& out) {
  auto wrapped = [&](const Expr& child, bool paren) {
    if (paren) out += '(';
    print(child, out);
    if (paren) out += ')';
  };
  switch (e.kind()) {
    case NodeKind::constant:
      if (!e.name().empty()) {
        out += e.name();
      } else if (std::signbit(e.value())) {
        out += '(';
        out += format_number(e.value());
        out += ')';
      } else {
        out += format_number(e.value());
      }
      return;
    case NodeKind::variable: out += e.name(); return;
    case NodeKind::negate:
      out += '-';
      wrapped(e.operand(), precedence(e.operand()) < 3);
      return;
    case NodeKind::call:
      out += function_name(e.function());
      out += '(';
      print(e.operand(), out);
      out += ')';
      return;
    case NodeKind::binary: break;
  }
  const int p = precedence(e);
  if (e.binary_op() == BinaryOp::pow) {
    wrapped(e.left(), precedence(e.left()) <= 4);
    out += '^';
    wrapped(e.right(), precedence(e.right()) < 3);
    return;
  }
  wrapped(e.left(), precedence(e.left()) < p);
  switch (e.binary_op()) {
    case BinaryOp::add: out += " + "; break;
    case BinaryOp::sub: out += " - "; break;
    case BinaryOp::mul: out += '*'; break;
    case BinaryOp::div: out += '/'; break;
    case BinaryOp::pow: break;
  }
  wrapped(e.right(), precedence(e.right()) <= p);
}

inline void print_tree(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::constant:
      out += "Const ";
      out += e.name().empty() ? format_number(e.value()) : e.name();
      return;
    case NodeKind::variable:
      out += "Var ";
      out += e.name();
      return;
    case NodeKind::negate:
      out += "Neg(";
      print_tree(e.operand(), out);
      out += ')';
      return;
    case NodeKind::call: {
      std::string name(function_name(e.function()));
      name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
      out += name;
      out += '(';
      print_tree(e.operand(), out);
      out += ')';
      return;
    }
    case NodeKind::binary: break;
  }
  static constexpr const char* kNames[] = {"Add", "Sub", "Mul", "Div", "Pow"};
  out += kNames[static_cast<int>(e.binary_op())];
  out += '(';
  print_tree(e.left(), out);
  out += ", ";
  print_tree(e.right(), out);
  out += ')';
}

}  // namespace detail

/// Parses `text`. With an empty `variable` the first free identifier becomes the
/// variable; any other free identifier is then rejected.
inline Expr parse(std::string_view text, std::string variable = {}) {
  return detail::Parser(text, std::move(variable)).run();
}

/// Formula text that parses back to an expression with identical values.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print(e, out);
  return out;
}

/// Constructor-style dump, e.g. "Pow(Var x, Const 3)".
inline std::string tree_string(const Expr& e) {
  std::string out;
  detail::print_tree(e, out);
  return out;
}

}  // namespace quadratura
