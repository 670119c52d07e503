#pragma once

// Interval enclosures of expressions over a range of the variable, and a
// monotonicity test built on them.
//
// Enclosures are widened outward by a few ulps after every operation, so they
// contain the exact range of the expression. A range that may contain an
// undefined point (division by an interval containing 0, log or sqrt of a
// possibly non-positive argument, a tan pole) comes back empty.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "quadratura/expr.hpp"
#include "quadratura/symbolic.hpp"

namespace quadratura {

namespace detail {

struct Range {
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();

  bool ok() const { return !std::isnan(lo) && !std::isnan(hi); }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

inline double widen_down(double x) {
  if (!std::isfinite(x)) return x;
  return x - (std::fabs(x) * 8.0 * std::numeric_limits<double>::epsilon() +
              std::numeric_limits<double>::denorm_min());
}

inline double widen_up(double x) {
  if (!std::isfinite(x)) return x;
  return x + (std::fabs(x) * 8.0 * std::numeric_limits<double>::epsilon() +
              std::numeric_limits<double>::denorm_min());
}

inline Range make_range(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return {};
  return {widen_down(std::min(a, b)), widen_up(std::max(a, b))};
}

inline Range r_add(Range x, Range y) { return make_range(x.lo + y.lo, x.hi + y.hi); }
inline Range r_sub(Range x, Range y) { return make_range(x.lo - y.hi, x.hi - y.lo); }

inline Range r_mul(Range x, Range y) {
  const double p[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
  double lo = p[0], hi = p[0];
  for (double v : p) {
    if (std::isnan(v)) return {};
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return make_range(lo, hi);
}

inline Range r_div(Range x, Range y) {
  if (y.contains(0.0)) return {};
  return r_mul(x, make_range(1.0 / y.hi, 1.0 / y.lo));
}

inline Range r_powi(Range x, long k) {
  if (k == 0) return {1.0, 1.0};
  if (k < 0) return r_div({1.0, 1.0}, r_powi(x, -k));
  const double a = std::pow(x.lo, static_cast<double>(k));
  const double b = std::pow(x.hi, static_cast<double>(k));
  if (k % 2 == 1) return make_range(a, b);
  if (x.contains(0.0)) return make_range(0.0, std::max(a, b));
  return make_range(a, b);
}

// x^c for a non-integer constant c: defined for x >= 0 (x > 0 when c < 0).
inline Range r_powc(Range x, double c) {
  if (x.lo < 0.0 || (c < 0.0 && x.lo <= 0.0)) return {};
  return make_range(std::pow(x.lo, c), std::pow(x.hi, c));
}

// Whether some point p0 + k * period lies in [lo, hi] (inclusive, with slack).
inline bool hits(double lo, double hi, double p0, double period) {
  const double k = std::ceil((lo - p0) / period - 1e-9);
  return p0 + k * period <= hi + 1e-12 * (1.0 + std::fabs(hi));
}

inline Range r_sin(Range x) {
  constexpr double pi = std::numbers::pi;
  if (!x.finite() || x.hi - x.lo >= 2 * pi) return {-1.0, 1.0};
  const double a = std::sin(x.lo), b = std::sin(x.hi);
  const double lo = hits(x.lo, x.hi, -pi / 2, 2 * pi) ? -1.0 : std::min(a, b);
  const double hi = hits(x.lo, x.hi, pi / 2, 2 * pi) ? 1.0 : std::max(a, b);
  return make_range(lo, hi);
}

inline Range r_cos(Range x) {
  constexpr double pi = std::numbers::pi;
  if (!x.finite() || x.hi - x.lo >= 2 * pi) return {-1.0, 1.0};
  const double a = std::cos(x.lo), b = std::cos(x.hi);
  const double lo = hits(x.lo, x.hi, pi, 2 * pi) ? -1.0 : std::min(a, b);
  const double hi = hits(x.lo, x.hi, 0.0, 2 * pi) ? 1.0 : std::max(a, b);
  return make_range(lo, hi);
}

inline Range r_tan(Range x) {
  constexpr double pi = std::numbers::pi;
  if (!x.finite() || x.hi - x.lo >= pi || hits(x.lo, x.hi, pi / 2, pi)) return {};
  return make_range(std::tan(x.lo), std::tan(x.hi));
}

inline Range r_call(Function f, Range x) {
  switch (f) {
    case Function::sin: return r_sin(x);
    case Function::cos: return r_cos(x);
    case Function::tan: return r_tan(x);
    case Function::sqrt:
      if (x.lo < 0.0) return {};
      return make_range(std::sqrt(x.lo), std::sqrt(x.hi));
    case Function::atan: return make_range(std::atan(x.lo), std::atan(x.hi));
    case Function::exp: return make_range(std::exp(x.lo), std::exp(x.hi));
    case Function::log:
      if (x.lo <= 0.0) return {};
      return make_range(std::log(x.lo), std::log(x.hi));
    case Function::abs:
      if (x.contains(0.0)) return make_range(0.0, std::max(-x.lo, x.hi));
      return make_range(std::fabs(x.lo), std::fabs(x.hi));
  }
  return {};
}

// Postfix form of an expression for repeated enclosure; constant subtrees
// are folded.
class RangeProgram {
 public:
  explicit RangeProgram(const Expr& e) { compile(e); }

  Range run(Range x) const {
    Range stack[kMaxDepth];
    std::size_t top = 0;
    for (const Op& op : ops_) {
      switch (op.code) {
        case Code::constant: stack[top++] = {op.c, op.c}; break;
        case Code::variable: stack[top++] = x; break;
        case Code::negate: stack[top - 1] = {-stack[top - 1].hi, -stack[top - 1].lo}; break;
        case Code::call: stack[top - 1] = r_call(op.fn, stack[top - 1]); break;
        case Code::powi: stack[top - 1] = r_powi(stack[top - 1], op.k); break;
        case Code::powc: stack[top - 1] = r_powc(stack[top - 1], op.c); break;
        default: {
          const Range r = stack[--top];
          const Range l = stack[top - 1];
          Range& out = stack[top - 1];
          if (!l.ok() || !r.ok()) {
            out = {};
            break;
          }
          switch (op.code) {
            case Code::add: out = r_add(l, r); break;
            case Code::sub: out = r_sub(l, r); break;
            case Code::mul: out = r_mul(l, r); break;
            case Code::div: out = r_div(l, r); break;
            default:
              out = l.lo <= 0.0 ? Range{} : r_call(Function::exp, r_mul(r, r_call(Function::log, l)));
          }
        }
      }
      if (!stack[top - 1].ok()) return {};
    }
    return stack[0];
  }

  bool valid() const { return valid_; }

 private:
  enum class Code : std::uint8_t { constant, variable, negate, call, powi, powc, add, sub, mul, div, pow };
  struct Op {
    Code code;
    Function fn = Function::sin;
    long k = 0;
    double c = 0.0;
  };
  static constexpr std::size_t kMaxDepth = 64;

  std::size_t compile(const Expr& e) {
    if (e.is_constant()) {
      const double v = e(0.0);
      if (std::isnan(v)) valid_ = false;
      ops_.push_back({Code::constant, Function::sin, 0, v});
      return 1;
    }
    std::size_t depth = 1;
    switch (e.kind()) {
      case NodeKind::constant: ops_.push_back({Code::constant, Function::sin, 0, e.value()}); break;
      case NodeKind::variable: ops_.push_back({Code::variable}); break;
      case NodeKind::negate:
        depth = compile(e.operand());
        ops_.push_back({Code::negate});
        break;
      case NodeKind::call:
        depth = compile(e.operand());
        ops_.push_back({Code::call, e.function()});
        break;
      case NodeKind::binary: {
        const Expr r = e.right();
        if (e.binary_op() == BinaryOp::pow && r.is_constant()) {
          const double c = r(0.0);
          depth = compile(e.left());
          if (std::isnan(c)) valid_ = false;
          if (c == std::round(c) && std::fabs(c) <= 1024)
            ops_.push_back({Code::powi, Function::sin, static_cast<long>(c)});
          else
            ops_.push_back({Code::powc, Function::sin, 0, c});
          break;
        }
        const std::size_t dl = compile(e.left());
        const std::size_t dr = compile(r);
        depth = std::max(dl, dr + 1);
        Code code = Code::add;
        switch (e.binary_op()) {
          case BinaryOp::add: code = Code::add; break;
          case BinaryOp::sub: code = Code::sub; break;
          case BinaryOp::mul: code = Code::mul; break;
          case BinaryOp::div: code = Code::div; break;
          case BinaryOp::pow: code = Code::pow; break;
        }
        ops_.push_back({code});
        break;
      }
    }
    if (depth > kMaxDepth) valid_ = false;
    return depth;
  }

  std::vector<Op> ops_;
  bool valid_ = true;
};

inline Range enclose(const Expr& e, Range x) {
  const RangeProgram p(e);
  return p.valid() ? p.run(x) : Range{};
}

}  // namespace detail

/// Proves f monotone on a range: f is finite there and f' keeps one sign.
class MonotoneCertifier {
 public:
  MonotoneCertifier(Expr f, Expr df)
      : f_(std::move(f)), df_(std::move(df)), fp_(f_), dfp_(df_) {}

  /// Symbolic derivative of f, or nothing when f has none.
  static std::optional<MonotoneCertifier> for_expr(const Expr& f) {
    try {
      return MonotoneCertifier(f, differentiate(f, f.variable_name()));
    } catch (const NotDifferentiable&) {
      return std::nullopt;
    }
  }

  bool monotone(double lo, double hi) const {
    if (!fp_.valid() || !dfp_.valid()) return false;
    const detail::Range x{lo, hi};
    const detail::Range v = fp_.run(x);
    if (!v.ok() || !v.finite()) return false;
    const detail::Range d = dfp_.run(x);
    if (!d.ok()) return false;
    return d.lo >= 0.0 || d.hi <= 0.0;
  }

  const Expr& function() const { return f_; }
  const Expr& derivative() const { return df_; }

 private:
  Expr f_;
  Expr df_;
  detail::RangeProgram fp_;
  detail::RangeProgram dfp_;
};

}  // namespace quadratura
