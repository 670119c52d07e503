#pragma once

// What the quadrature layer accepts as a function.
//
// Anything callable as double(double) works. Types with an eval_batch member
// are evaluated a block of abscissae at a time (Expr does this). Types with an
// exact_bounds member can report the true infimum and supremum over a cell,
// which the Darboux routines use in place of sampling.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "quadratura/partition.hpp"

namespace quadratura {

struct Bounds {
  double inf;
  double sup;
};

template <class F>
concept BatchIntegrand = requires(const F& f, std::span<const double> xs, std::span<double> out) {
  f.eval_batch(xs, out);
};

template <class F>
concept ScalarIntegrand = requires(const F& f, double x) {
  { f(x) } -> std::convertible_to<double>;
};

template <class F>
concept Integrand = BatchIntegrand<F> || ScalarIntegrand<F>;

template <class F>
concept ExactBoundsHint = requires(const F& f, double lo, double hi) {
  { f.exact_bounds(lo, hi) } -> std::same_as<std::optional<Bounds>>;
};

template <Integrand F>
void evaluate(const F& f, std::span<const double> xs, std::span<double> out) {
  if constexpr (BatchIntegrand<F>) {
    f.eval_batch(xs, out);
  } else {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = static_cast<double>(f(xs[i]));
  }
}

template <Integrand F>
double evaluate(const F& f, double x) {
  if constexpr (ScalarIntegrand<F>) {
    return static_cast<double>(f(x));
  } else {
    double out = 0.0;
    f.eval_batch(std::span<const double>(&x, 1), std::span<double>(&out, 1));
    return out;
  }
}

/// Piecewise-monotone function: monotone between consecutive turning points.
/// The exact infimum and supremum over [lo, hi] are attained among lo, hi and
/// the turning points inside. Also valid for monotone step functions whose
/// extreme values are attained at cell endpoints.
template <Integrand F>
class MonotoneHinted {
 public:
  MonotoneHinted(F f, std::vector<double> turning_points)
      : f_(std::move(f)), turning_(std::move(turning_points)) {
    std::sort(turning_.begin(), turning_.end());
  }

  double operator()(double x) const { return evaluate(f_, x); }

  void eval_batch(std::span<const double> xs, std::span<double> out) const {
    evaluate(f_, xs, out);
  }

  std::optional<Bounds> exact_bounds(double lo, double hi) const {
    Bounds b{std::min(evaluate(f_, lo), evaluate(f_, hi)),
             std::max(evaluate(f_, lo), evaluate(f_, hi))};
    auto it = std::upper_bound(turning_.begin(), turning_.end(), lo);
    for (; it != turning_.end() && *it < hi; ++it) {
      const double v = evaluate(f_, *it);
      b.inf = std::min(b.inf, v);
      b.sup = std::max(b.sup, v);
    }
    if (std::isnan(b.inf) || std::isnan(b.sup)) return std::nullopt;
    return b;
  }

  const F& function() const { return f_; }

 private:
  F f_;
  std::vector<double> turning_;
};

/// |f - g|.
template <Integrand F, Integrand G>
class AbsDifference {
 public:
  AbsDifference(const F& f, const G& g) : f_(f), g_(g) {}

  double operator()(double x) const { return std::fabs(evaluate(f_, x) - evaluate(g_, x)); }

  void eval_batch(std::span<const double> xs, std::span<double> out) const {
    thread_local std::vector<double> tmp;
    tmp.resize(xs.size());
    evaluate(f_, xs, out);
    evaluate(g_, xs, std::span<double>(tmp));
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::fabs(out[i] - tmp[i]);
  }

 private:
  const F& f_;
  const G& g_;
};

/// f on the closed interval `support`, zero elsewhere.
template <Integrand F>
class RestrictedTo {
 public:
  RestrictedTo(const F& f, Interval support) : f_(f), support_(support) {}

  double operator()(double x) const { return support_.contains(x) ? evaluate(f_, x) : 0.0; }

  void eval_batch(std::span<const double> xs, std::span<double> out) const {
    evaluate(f_, xs, out);
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (!support_.contains(xs[i])) out[i] = 0.0;
  }

 private:
  const F& f_;
  Interval support_;
};

}  // namespace quadratura
