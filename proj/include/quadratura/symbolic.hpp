#pragma once

// Symbolic differentiation and substitution with light simplification.
//
// The builders in `sym` fold constant operands and drop neutral elements
// (x*1, x+0, x^1, ...). No canonical form is attempted: results are only
// guaranteed to agree pointwise with the mathematical derivative wherever both
// are defined.

#include <cmath>
#include <string>

#include "quadratura/errors.hpp"
#include "quadratura/expr.hpp"
#include "quadratura/parser.hpp"

namespace quadratura {

namespace sym {

inline bool is_literal(const Expr& e) { return e.kind() == NodeKind::constant; }

inline Expr folded_or(const Expr& candidate) {
  if (candidate.is_constant()) {
    const double v = candidate(0.0);
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return candidate;
}

inline Expr neg(const Expr& a) {
  if (is_literal(a) && a.name().empty()) return Expr::constant(-a.value());
  if (a.kind() == NodeKind::negate) return a.operand();
  return Expr::negate(a);
}

inline Expr add(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (is_literal(a) && is_literal(b)) return folded_or(Expr::binary(BinaryOp::add, a, b));
  return Expr::binary(BinaryOp::add, a, b);
}

inline Expr sub(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return neg(b);
  if (is_literal(a) && is_literal(b)) return folded_or(Expr::binary(BinaryOp::sub, a, b));
  return Expr::binary(BinaryOp::sub, a, b);
}

inline Expr mul(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return neg(b);
  if (b.is_constant(-1.0)) return neg(a);
  if (is_literal(a) && is_literal(b)) return folded_or(Expr::binary(BinaryOp::mul, a, b));
  return Expr::binary(BinaryOp::mul, a, b);
}

inline Expr div(const Expr& a, const Expr& b) {
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  if (is_literal(a) && is_literal(b)) return folded_or(Expr::binary(BinaryOp::div, a, b));
  return Expr::binary(BinaryOp::div, a, b);
}

inline Expr pow(const Expr& a, const Expr& b) {
  if (b.is_constant(1.0)) return a;
  if (b.is_constant(0.0)) return Expr::constant(1.0);
  if (is_literal(a) && is_literal(b)) return folded_or(Expr::binary(BinaryOp::pow, a, b));
  return Expr::binary(BinaryOp::pow, a, b);
}

inline Expr call(Function f, const Expr& a) {
  if (is_literal(a)) return folded_or(Expr::call(f, a));
  return Expr::call(f, a);
}

}  // namespace sym

/// True when `e` contains the variable `var`.
inline bool depends_on(const Expr& e, const std::string& var) {
  switch (e.kind()) {
    case NodeKind::constant: return false;
    case NodeKind::variable: return e.name() == var;
    case NodeKind::negate:
    case NodeKind::call: return depends_on(e.operand(), var);
    case NodeKind::binary: return depends_on(e.left(), var) || depends_on(e.right(), var);
  }
  return false;
}

/// d e / d var. Throws NotDifferentiable on abs() of a var-dependent argument
/// and on exponents that depend on `var`.
inline Expr differentiate(const Expr& e, const std::string& var) {
  if (!depends_on(e, var)) return Expr::constant(0.0);
  switch (e.kind()) {
    case NodeKind::constant: return Expr::constant(0.0);
    case NodeKind::variable: return Expr::constant(1.0);
    case NodeKind::negate: return sym::neg(differentiate(e.operand(), var));
    case NodeKind::call: {
      const Expr u = e.operand();
      const Expr du = differentiate(u, var);
      switch (e.function()) {
        case Function::sin: return sym::mul(sym::call(Function::cos, u), du);
        case Function::cos: return sym::mul(sym::neg(sym::call(Function::sin, u)), du);
        case Function::tan:
          return sym::div(du, sym::pow(sym::call(Function::cos, u), Expr::constant(2.0)));
        case Function::sqrt:
          return sym::div(du, sym::mul(Expr::constant(2.0), sym::call(Function::sqrt, u)));
        case Function::atan:
          return sym::div(du, sym::add(Expr::constant(1.0), sym::pow(u, Expr::constant(2.0))));
        case Function::exp: return sym::mul(sym::call(Function::exp, u), du);
        case Function::log: return sym::div(du, u);
        case Function::abs:
          throw NotDifferentiable("cannot differentiate node abs(" + to_string(u) + ")");
      }
      break;
    }
    case NodeKind::binary: break;
  }

  const Expr u = e.left();
  const Expr v = e.right();
  switch (e.binary_op()) {
    case BinaryOp::add: return sym::add(differentiate(u, var), differentiate(v, var));
    case BinaryOp::sub: return sym::sub(differentiate(u, var), differentiate(v, var));
    case BinaryOp::mul:
      return sym::add(sym::mul(differentiate(u, var), v), sym::mul(u, differentiate(v, var)));
    case BinaryOp::div: {
      const Expr du = differentiate(u, var);
      const Expr dv = differentiate(v, var);
      if (dv.is_constant(0.0)) return sym::div(du, v);
      return sym::div(sym::sub(sym::mul(du, v), sym::mul(u, dv)),
                      sym::pow(v, Expr::constant(2.0)));
    }
    case BinaryOp::pow: {
      if (depends_on(v, var))
        throw NotDifferentiable("cannot differentiate node " + to_string(e) +
                                ": exponent must be a constant");
      const double c = v(0.0);
      const Expr scale = std::isfinite(c) ? Expr::constant(c) : v;
      const Expr reduced =
          std::isfinite(c) ? Expr::constant(c - 1.0) : sym::sub(v, Expr::constant(1.0));
      return sym::mul(sym::mul(scale, sym::pow(u, reduced)), differentiate(u, var));
    }
  }
  return Expr::constant(0.0);
}

/// Replaces every occurrence of variable `var` in `e` by `replacement`.
inline Expr compose(const Expr& e, const std::string& var, const Expr& replacement) {
  switch (e.kind()) {
    case NodeKind::constant: return e;
    case NodeKind::variable: return e.name() == var ? replacement : e;
    case NodeKind::negate: return Expr::negate(compose(e.operand(), var, replacement));
    case NodeKind::call: return Expr::call(e.function(), compose(e.operand(), var, replacement));
    case NodeKind::binary:
      return Expr::binary(e.binary_op(), compose(e.left(), var, replacement),
                          compose(e.right(), var, replacement));
  }
  return e;
}

}  // namespace quadratura
