#pragma once

// Immutable expression trees for real functions of one variable.
//
// An Expr is a cheap handle (shared pointer) to an immutable node. Evaluation
// goes through a small stack program compiled on first use; the scalar and the
// batch entry points run the same element kernels, so both produce bitwise
// identical values.
//
// Undefined results (division by zero, log of a non-positive number, ...) are
// represented internally as quiet NaN and surface through EvalOutcome.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "quadratura/errors.hpp"
#include "quadratura/simd.hpp"

namespace quadratura {

enum class NodeKind { constant, variable, negate, binary, call };
enum class BinaryOp { add, sub, mul, div, pow };
enum class Function { sin, cos, tan, sqrt, atan, exp, log, abs };

inline constexpr std::array<std::pair<std::string_view, Function>, 8> kFunctionNames{{
    {"sin", Function::sin},
    {"cos", Function::cos},
    {"tan", Function::tan},
    {"sqrt", Function::sqrt},
    {"atan", Function::atan},
    {"exp", Function::exp},
    {"log", Function::log},
    {"abs", Function::abs},
}};

inline std::string_view function_name(Function f) {
  for (const auto& [name, fn] : kFunctionNames)
    if (fn == f) return name;
  return "?";
}

/// Extended-real result of a point evaluation.
struct EvalOutcome {
  enum class Kind { finite, pos_infinity, neg_infinity, undefined };

  Kind kind = Kind::undefined;
  double value = std::numeric_limits<double>::quiet_NaN();

  static EvalOutcome from_double(double v) {
    if (std::isnan(v)) return {Kind::undefined, v};
    if (std::isinf(v)) return {v > 0 ? Kind::pos_infinity : Kind::neg_infinity, v};
    return {Kind::finite, v};
  }

  bool finite() const { return kind == Kind::finite; }
  bool undefined() const { return kind == Kind::undefined; }
};


namespace detail {

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

// Element kernels. Every evaluation path goes through these.
inline double k_div(double a, double b) {
  const double q = a / b;
  return b == 0.0 ? kUndefined : q;
}

inline double k_powi(double a, int k) {
  if (std::isnan(a)) return kUndefined;
  if (k < 0) {
    if (a == 0.0) return kUndefined;
    return 1.0 / k_powi(a, -k);
  }
  double result = 1.0;
  double base = a;
  unsigned e = static_cast<unsigned>(k);
  while (e != 0) {
    if (e & 1u) result *= base;
    e >>= 1;
    if (e != 0) base *= base;
  }
  return result;
}

// Unrolled cases of k_powi; same operation order as the generic loop.
inline double k_powi2(double a) { return 1.0 * a * a; }
inline double k_powi3(double a) { return (1.0 * a) * (a * a); }
inline double k_powi4(double a) { return 1.0 * ((a * a) * (a * a)); }

inline double k_pow(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return kUndefined;
  if (a == 0.0 && b < 0.0) return kUndefined;
  return std::pow(a, b);
}

inline double k_log(double a) { return a > 0.0 ? std::log(a) : kUndefined; }
inline double k_sqrt(double a) { return a >= 0.0 ? std::sqrt(a) : kUndefined; }

inline double apply(Function f, double a) {
  switch (f) {
    case Function::sin: return std::sin(a);
    case Function::cos: return std::cos(a);
    case Function::tan: return std::tan(a);
    case Function::sqrt: return k_sqrt(a);
    case Function::atan: return std::atan(a);
    case Function::exp: return std::exp(a);
    case Function::log: return k_log(a);
    case Function::abs: return std::fabs(a);
  }
  return kUndefined;
}

inline void apply_span(Function f, double* d, std::size_t n) {
  switch (f) {
    case Function::sin: for (std::size_t i = 0; i < n; ++i) d[i] = std::sin(d[i]); return;
    case Function::cos: for (std::size_t i = 0; i < n; ++i) d[i] = std::cos(d[i]); return;
    case Function::tan: for (std::size_t i = 0; i < n; ++i) d[i] = std::tan(d[i]); return;
    case Function::sqrt: for (std::size_t i = 0; i < n; ++i) d[i] = k_sqrt(d[i]); return;
    case Function::atan: for (std::size_t i = 0; i < n; ++i) d[i] = std::atan(d[i]); return;
    case Function::exp: for (std::size_t i = 0; i < n; ++i) d[i] = std::exp(d[i]); return;
    case Function::log: for (std::size_t i = 0; i < n; ++i) d[i] = k_log(d[i]); return;
    case Function::abs: for (std::size_t i = 0; i < n; ++i) d[i] = std::fabs(d[i]); return;
  }
}

inline double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return k_div(a, b);
    case BinaryOp::pow: return k_pow(a, b);
  }
  return kUndefined;
}

enum class Code : std::uint8_t {
  push_const,
  push_var,
  negate,
  add,
  sub,
  mul,
  div,
  add_c,   // x + imm
  sub_c,   // x - imm
  mul_c,   // x * imm
  div_c,   // x / imm
  rsub_c,  // imm - x
  rdiv_c,  // imm / x
  powi,  // integer constant exponent in `k`
  powc,  // non-integer constant exponent in `imm`
  pow,   // general exponent taken from the stack
  call,  // function in `fn`
};

struct Instr {
  Code code;
  Function fn = Function::sin;
  int k = 0;
  double imm = 0.0;
};

/// Postfix program evaluated on a value stack.
class Program {
 public:
  Program() = default;
  Program(std::vector<Instr> code, std::size_t depth) : code_(std::move(code)), depth_(depth) {}

  double run(double x) const {
    std::array<double, 64> small{};
    std::vector<double> big;
    double* stack = small.data();
    if (depth_ > small.size()) {
      big.resize(depth_);
      stack = big.data();
    }
    std::size_t sp = 0;
    for (const Instr& in : code_) {
      switch (in.code) {
        case Code::push_const: stack[sp++] = in.imm; break;
        case Code::push_var: stack[sp++] = x; break;
        case Code::negate: stack[sp - 1] = -stack[sp - 1]; break;
        case Code::add: --sp; stack[sp - 1] = stack[sp - 1] + stack[sp]; break;
        case Code::sub: --sp; stack[sp - 1] = stack[sp - 1] - stack[sp]; break;
        case Code::mul: --sp; stack[sp - 1] = stack[sp - 1] * stack[sp]; break;
        case Code::div: --sp; stack[sp - 1] = k_div(stack[sp - 1], stack[sp]); break;
        case Code::add_c: stack[sp - 1] = stack[sp - 1] + in.imm; break;
        case Code::sub_c: stack[sp - 1] = stack[sp - 1] - in.imm; break;
        case Code::mul_c: stack[sp - 1] = stack[sp - 1] * in.imm; break;
        case Code::div_c: stack[sp - 1] = k_div(stack[sp - 1], in.imm); break;
        case Code::rsub_c: stack[sp - 1] = in.imm - stack[sp - 1]; break;
        case Code::rdiv_c: stack[sp - 1] = k_div(in.imm, stack[sp - 1]); break;
        case Code::pow: --sp; stack[sp - 1] = k_pow(stack[sp - 1], stack[sp]); break;
        case Code::powi: stack[sp - 1] = k_powi(stack[sp - 1], in.k); break;
        case Code::powc: stack[sp - 1] = k_pow(stack[sp - 1], in.imm); break;
        case Code::call: stack[sp - 1] = apply(in.fn, stack[sp - 1]); break;
      }
    }
    return stack[0];
  }

  QUADRATURA_CLONES void run_batch(std::span<const double> xs, std::span<double> out) const {
    constexpr std::size_t kLanes = 256;
    thread_local std::vector<double> scratch;
    if (scratch.size() < depth_ * kLanes) scratch.resize(depth_ * kLanes);
    double* base = scratch.data();

    for (std::size_t off = 0; off < xs.size(); off += kLanes) {
      const std::size_t n = std::min(kLanes, xs.size() - off);
      const double* QUADRATURA_RESTRICT x = xs.data() + off;
      std::size_t sp = 0;
      auto slot = [&](std::size_t i) { return base + i * kLanes; };
      for (const Instr& in : code_) {
        switch (in.code) {
          case Code::push_const: {
            double* QUADRATURA_RESTRICT d = slot(sp++);
            const double v = in.imm;
            for (std::size_t i = 0; i < n; ++i) d[i] = v;
            break;
          }
          case Code::push_var: {
            double* QUADRATURA_RESTRICT d = slot(sp++);
            for (std::size_t i = 0; i < n; ++i) d[i] = x[i];
            break;
          }
          case Code::negate: {
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            for (std::size_t i = 0; i < n; ++i) d[i] = -d[i];
            break;
          }
          case Code::add: {
            --sp;
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double* QUADRATURA_RESTRICT s = slot(sp);
            for (std::size_t i = 0; i < n; ++i) d[i] = d[i] + s[i];
            break;
          }
          case Code::sub: {
            --sp;
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double* QUADRATURA_RESTRICT s = slot(sp);
            for (std::size_t i = 0; i < n; ++i) d[i] = d[i] - s[i];
            break;
          }
          case Code::mul: {
            --sp;
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double* QUADRATURA_RESTRICT s = slot(sp);
            for (std::size_t i = 0; i < n; ++i) d[i] = d[i] * s[i];
            break;
          }
          case Code::div: {
            --sp;
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double* QUADRATURA_RESTRICT s = slot(sp);
            // Plain division, then patch zero divisors; same values as k_div.
            int zeros = 0;
            for (std::size_t i = 0; i < n; ++i) zeros |= s[i] == 0.0;
            for (std::size_t i = 0; i < n; ++i) d[i] = d[i] / s[i];
            if (zeros)
              for (std::size_t i = 0; i < n; ++i)
                if (s[i] == 0.0) d[i] = kUndefined;
            break;
          }
          case Code::add_c: {
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double v = in.imm;
            for (std::size_t i = 0; i < n; ++i) d[i] = d[i] + v;
            break;
          }
          case Code::sub_c: {
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double v = in.imm;
            for (std::size_t i = 0; i < n; ++i) d[i] = d[i] - v;
            break;
          }
          case Code::mul_c: {
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double v = in.imm;
            for (std::size_t i = 0; i < n; ++i) d[i] = d[i] * v;
            break;
          }
          case Code::div_c: {
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double v = in.imm;
            if (v == 0.0) {
              for (std::size_t i = 0; i < n; ++i) d[i] = kUndefined;
            } else {
              for (std::size_t i = 0; i < n; ++i) d[i] = d[i] / v;
            }
            break;
          }
          case Code::rsub_c: {
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double v = in.imm;
            for (std::size_t i = 0; i < n; ++i) d[i] = v - d[i];
            break;
          }
          case Code::rdiv_c: {
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double v = in.imm;
            int zeros = 0;
            for (std::size_t i = 0; i < n; ++i) zeros |= d[i] == 0.0;
            if (zeros) {
              for (std::size_t i = 0; i < n; ++i) d[i] = k_div(v, d[i]);
            } else {
              for (std::size_t i = 0; i < n; ++i) d[i] = v / d[i];
            }
            break;
          }
          case Code::pow: {
            --sp;
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double* QUADRATURA_RESTRICT s = slot(sp);
            for (std::size_t i = 0; i < n; ++i) d[i] = k_pow(d[i], s[i]);
            break;
          }
          case Code::powi: {
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            switch (in.k) {
              case 2:
                for (std::size_t i = 0; i < n; ++i) d[i] = k_powi2(d[i]);
                break;
              case 3:
                for (std::size_t i = 0; i < n; ++i) d[i] = k_powi3(d[i]);
                break;
              case 4:
                for (std::size_t i = 0; i < n; ++i) d[i] = k_powi4(d[i]);
                break;
              default: {
                const int k = in.k;
                for (std::size_t i = 0; i < n; ++i) d[i] = k_powi(d[i], k);
              }
            }
            break;
          }
          case Code::powc: {
            double* QUADRATURA_RESTRICT d = slot(sp - 1);
            const double e = in.imm;
            for (std::size_t i = 0; i < n; ++i) d[i] = k_pow(d[i], e);
            break;
          }
          case Code::call: apply_span(in.fn, slot(sp - 1), n); break;
        }
      }
      const double* r = slot(0);
      for (std::size_t i = 0; i < n; ++i) out[off + i] = r[i];
    }
  }

 private:
  std::vector<Instr> code_;
  std::size_t depth_ = 1;
};

struct Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;
  std::string name;  // variable name, or symbol of a named constant
  BinaryOp op = BinaryOp::add;
  Function fn = Function::sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
  bool has_variable = false;

  mutable std::once_flag compiled;
  mutable Program program;
};

}  // namespace detail

/// Handle to an immutable expression tree. Every variable node reads the same
/// argument: expressions are univariate.
class Expr {
 public:
  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double v) {
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::constant;
    n->value = v;
    return Expr(std::move(n));
  }

  static Expr named_constant(std::string symbol, double v) {
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::constant;
    n->value = v;
    n->name = std::move(symbol);
    return Expr(std::move(n));
  }

  static Expr variable(std::string name) {
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::variable;
    n->name = std::move(name);
    n->has_variable = true;
    return Expr(std::move(n));
  }

  static Expr negate(const Expr& operand) {
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::negate;
    n->lhs = operand.node_;
    n->has_variable = operand.node_->has_variable;
    return Expr(std::move(n));
  }

  static Expr binary(BinaryOp op, const Expr& l, const Expr& r) {
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::binary;
    n->op = op;
    n->lhs = l.node_;
    n->rhs = r.node_;
    n->has_variable = l.node_->has_variable || r.node_->has_variable;
    return Expr(std::move(n));
  }

  static Expr call(Function fn, const Expr& arg) {
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::call;
    n->fn = fn;
    n->lhs = arg.node_;
    n->has_variable = arg.node_->has_variable;
    return Expr(std::move(n));
  }

  NodeKind kind() const { return node_->kind; }
  double value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  BinaryOp binary_op() const { return node_->op; }
  Function function() const { return node_->fn; }
  bool is_constant() const { return !node_->has_variable; }
  bool is_constant(double v) const { return node_->kind == NodeKind::constant && node_->value == v; }

  /// Operand of a negate or call node; left operand of a binary node.
  Expr operand() const { return Expr(node_->lhs); }
  Expr left() const { return Expr(node_->lhs); }
  Expr right() const { return Expr(node_->rhs); }

  /// Name of the first variable found in the tree, or "" for a constant expression.
  std::string variable_name() const { return find_variable(*node_); }

  EvalOutcome eval(double x) const { return EvalOutcome::from_double(program().run(x)); }

  /// Point value with undefined mapped to NaN.
  double operator()(double x) const { return program().run(x); }

  void eval_batch(std::span<const double> xs, std::span<double> out) const {
    program().run_batch(xs, out);
  }

  /// Identity of the underlying node (for caches and tests).
  const void* id() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}

  const detail::Program& program() const {
    std::call_once(node_->compiled, [this] { node_->program = compile(*node_); });
    return node_->program;
  }

  static detail::Program compile(const detail::Node& root) {
    std::vector<detail::Instr> code;
    std::size_t depth = 0;
    std::size_t max_depth = 1;
    emit(root, code, depth, max_depth);
    return detail::Program(std::move(code), max_depth);
  }

  static double fold(const detail::Node& n) {
    std::vector<detail::Instr> code;
    std::size_t depth = 0;
    std::size_t max_depth = 1;
    emit_unfolded(n, code, depth, max_depth);
    return detail::Program(std::move(code), max_depth).run(0.0);
  }

  static void push(std::size_t& depth, std::size_t& max_depth) {
    ++depth;
    if (depth > max_depth) max_depth = depth;
  }

  static void emit(const detail::Node& n, std::vector<detail::Instr>& code, std::size_t& depth,
                   std::size_t& max_depth) {
    using detail::Code;
    if (!n.has_variable && n.kind != NodeKind::constant) {
      code.push_back({Code::push_const, Function::sin, 0, fold(n)});
      push(depth, max_depth);
      return;
    }
    emit_node(n, code, depth, max_depth, /*fold_children=*/true);
  }

  static void emit_unfolded(const detail::Node& n, std::vector<detail::Instr>& code,
                            std::size_t& depth, std::size_t& max_depth) {
    emit_node(n, code, depth, max_depth, /*fold_children=*/false);
  }

  static void emit_child(const detail::Node& n, std::vector<detail::Instr>& code,
                         std::size_t& depth, std::size_t& max_depth, bool fold_children) {
    if (fold_children)
      emit(n, code, depth, max_depth);
    else
      emit_unfolded(n, code, depth, max_depth);
  }

  static void emit_node(const detail::Node& n, std::vector<detail::Instr>& code, std::size_t& depth,
                        std::size_t& max_depth, bool fold_children) {
    using detail::Code;
    switch (n.kind) {
      case NodeKind::constant:
        code.push_back({Code::push_const, Function::sin, 0, n.value});
        push(depth, max_depth);
        return;
      case NodeKind::variable:
        code.push_back({Code::push_var});
        push(depth, max_depth);
        return;
      case NodeKind::negate:
        emit_child(*n.lhs, code, depth, max_depth, fold_children);
        code.push_back({Code::negate});
        return;
      case NodeKind::call:
        emit_child(*n.lhs, code, depth, max_depth, fold_children);
        code.push_back({Code::call, n.fn});
        return;
      case NodeKind::binary:
        break;
    }
    if (n.op == BinaryOp::pow && !n.rhs->has_variable) {
      const double e = fold_children || n.rhs->kind == NodeKind::constant ? constant_value(*n.rhs)
                                                                          : fold(*n.rhs);
      emit_child(*n.lhs, code, depth, max_depth, fold_children);
      if (std::isfinite(e) && e == std::trunc(e) && std::fabs(e) <= 64.0)
        code.push_back({Code::powi, Function::sin, static_cast<int>(e)});
      else
        code.push_back({Code::powc, Function::sin, 0, e});
      return;
    }
    // One constant operand: the constant travels as an immediate.
    const bool lhs_const = !n.lhs->has_variable;
    const bool rhs_const = !n.rhs->has_variable;
    if (fold_children && lhs_const != rhs_const && n.op != BinaryOp::pow) {
      const detail::Node& var_side = rhs_const ? *n.lhs : *n.rhs;
      const double imm = constant_value(rhs_const ? *n.rhs : *n.lhs);
      emit(var_side, code, depth, max_depth);
      Code c = Code::add_c;
      switch (n.op) {
        case BinaryOp::add: c = Code::add_c; break;
        case BinaryOp::mul: c = Code::mul_c; break;
        case BinaryOp::sub: c = rhs_const ? Code::sub_c : Code::rsub_c; break;
        case BinaryOp::div: c = rhs_const ? Code::div_c : Code::rdiv_c; break;
        case BinaryOp::pow: break;
      }
      code.push_back({c, Function::sin, 0, imm});
      return;
    }
    emit_child(*n.lhs, code, depth, max_depth, fold_children);
    emit_child(*n.rhs, code, depth, max_depth, fold_children);
    --depth;
    switch (n.op) {
      case BinaryOp::add: code.push_back({Code::add}); break;
      case BinaryOp::sub: code.push_back({Code::sub}); break;
      case BinaryOp::mul: code.push_back({Code::mul}); break;
      case BinaryOp::div: code.push_back({Code::div}); break;
      case BinaryOp::pow: code.push_back({Code::pow}); break;
    }
  }

  static double constant_value(const detail::Node& n) {
    return n.kind == NodeKind::constant ? n.value : fold(n);
  }

  static std::string find_variable(const detail::Node& n) {
    if (!n.has_variable) return {};
    if (n.kind == NodeKind::variable) return n.name;
    if (n.lhs && n.lhs->has_variable) return find_variable(*n.lhs);
    return find_variable(*n.rhs);
  }

  std::shared_ptr<const detail::Node> node_;
};

}  // namespace quadratura
