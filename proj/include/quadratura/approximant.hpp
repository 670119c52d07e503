#pragma once

// Piecewise-linear below-approximants f_n of a nonnegative function.
//
// For n >= 3 the interval is cut into 2^n blocks (see LemmaGrid). On block k
// the approximant sits at m_k, the infimum of f over the block. Where the level
// changes between blocks k and k+1 a linear ramp of width epsilon_n joins the
// two plateaus: it lies in the first piece of block k+1 when the level rises and
// in the last piece of block k when it falls, so the ramp always stays inside
// the block with the higher infimum. The result satisfies 0 <= f_n <= f.
// For n = 1 and n = 2 the approximant is the zero function.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "quadratura/darboux.hpp"
#include "quadratura/errors.hpp"
#include "quadratura/integrand.hpp"
#include "quadratura/parallel.hpp"
#include "quadratura/partition.hpp"
#include "quadratura/summation.hpp"

namespace quadratura {

/// Continuous piecewise-linear function given by knots and nonnegative values.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> knots, std::vector<double> values)
      : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() < 2) throw DomainError("a piecewise-linear function needs two knots");
    if (knots_.size() != values_.size())
      throw DomainError("knots and values differ in length");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i]))
        throw DomainError("knots and values must be finite");
      if (values_[i] < 0.0) throw DomainError("piecewise-linear values must be nonnegative");
      if (i > 0 && !(knots_[i - 1] < knots_[i]))
        throw DomainError("knots must be strictly increasing");
    }
  }

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return knots_.size(); }
  Interval range() const { return {knots_.front(), knots_.back()}; }

  double operator()(double x) const {
    if (!(knots_.front() <= x && x <= knots_.back())) {
      std::ostringstream os;
      os.precision(17);
      os << "x = " << x << " is outside the knot range [" << knots_.front() << ", "
         << knots_.back() << "]";
      throw DomainError(os.str());
    }
    return at(segment(x), x);
  }

  void eval_batch(std::span<const double> xs, std::span<double> out) const {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
  }

  /// Extremes over [lo, hi] are attained at lo, hi or a knot in between.
  std::optional<Bounds> exact_bounds(double lo, double hi) const {
    const double vlo = (*this)(lo);
    const double vhi = (*this)(hi);
    Bounds b{std::min(vlo, vhi), std::max(vlo, vhi)};
    auto it = std::upper_bound(knots_.begin(), knots_.end(), lo);
    for (; it != knots_.end() && *it < hi; ++it) {
      const double v = values_[static_cast<std::size_t>(it - knots_.begin())];
      b.inf = std::min(b.inf, v);
      b.sup = std::max(b.sup, v);
    }
    return b;
  }

 private:
  // Index i of the segment [knots_[i], knots_[i+1]] holding x.
  std::size_t segment(double x) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, knots_.size() - 2);
  }

  double at(std::size_t i, double x) const {
    const double x0 = knots_[i], x1 = knots_[i + 1];
    const double v0 = values_[i], v1 = values_[i + 1];
    if (x == x0) return v0;
    if (x == x1) return v1;
    const double v = v0 + (v1 - v0) * ((x - x0) / (x1 - x0));
    // Keep rounding from leaving the segment's value range.
    return std::clamp(v, std::min(v0, v1), std::max(v0, v1));
  }

  std::vector<double> knots_;
  std::vector<double> values_;
};

/// Linear interpolation; throws DomainError outside the knot range.
inline double eval_pl(const PiecewiseLinear& g, double x) { return g(x); }

/// Exact integral of g from c to d (trapezoids). c > d gives the negated value.
inline double integrate_pl(const PiecewiseLinear& g, double c, double d) {
  if (c > d) return -integrate_pl(g, d, c);
  const Interval r = g.range();
  if (!(r.a <= c && d <= r.b)) {
    std::ostringstream os;
    os.precision(17);
    os << "[" << c << ", " << d << "] is not inside the knot range [" << r.a << ", " << r.b
       << "]";
    throw DomainError(os.str());
  }
  if (c == d) return 0.0;
  const auto& k = g.knots();
  CompensatedSum sum;
  double x0 = c;
  double v0 = g(c);
  auto it = std::upper_bound(k.begin(), k.end(), c);
  for (; it != k.end() && *it < d; ++it) {
    const double x1 = *it;
    const double v1 = g.values()[static_cast<std::size_t>(it - k.begin())];
    sum.add(0.5 * (v0 + v1) * (x1 - x0));
    x0 = x1;
    v0 = v1;
  }
  sum.add(0.5 * (v0 + g(d)) * (d - x0));
  return sum.value();
}

inline double integrate_pl(const PiecewiseLinear& g) {
  return integrate_pl(g, g.range().a, g.range().b);
}

/// Infimum and supremum of f over each of the 2^n blocks of the grid, in block order.
template <Integrand F>
std::vector<Bounds> block_bounds(const F& f, const LemmaGrid& grid, const SamplingConfig& cfg = {}) {
  cfg.validate();
  const Partition blocks = grid.block_partition();
  const detail::PointsLayout layout{&blocks.points()};
  const std::size_t n = blocks.cells();
  const std::size_t per_chunk = std::max<std::size_t>(1, 4096 / cfg.samples_per_cell);
  const std::size_t chunks = (n + per_chunk - 1) / per_chunk;
  std::vector<Bounds> out(n);
  parallel_for(chunks, [&](std::size_t ci) {
    const std::size_t c0 = ci * per_chunk;
    const std::size_t c1 = std::min(n, c0 + per_chunk);
    thread_local std::vector<Bounds> bounds;
    detail::chunk_bounds(f, layout, cfg, c0, c1, bounds);
    std::copy(bounds.begin(), bounds.begin() + static_cast<std::ptrdiff_t>(c1 - c0),
              out.begin() + static_cast<std::ptrdiff_t>(c0));
  });
  return out;
}

/// Block infima m_k of f over the 2^n blocks of the grid, in block order.
template <Integrand F>
std::vector<double> block_infima(const F& f, const LemmaGrid& grid, const SamplingConfig& cfg = {}) {
  const std::vector<Bounds> b = block_bounds(f, grid, cfg);
  std::vector<double> m(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) m[k] = b[k].inf;
  return m;
}

/// The piecewise-linear approximant for given plateau levels m (one per block).
inline PiecewiseLinear approximant_from_levels(const LemmaGrid& grid, const std::vector<double>& m) {
  if (m.size() != grid.blocks()) throw DomainError("need one level per block");
  std::vector<double> knots;
  std::vector<double> values;
  knots.reserve(grid.sub_interval_count() + 1);
  values.reserve(grid.sub_interval_count() + 1);
  for (std::size_t k = 0; k < grid.blocks(); ++k) {
    const auto e = grid.edges(k);
    if (k == 0) {
      knots.push_back(e[0]);
      values.push_back(m[0]);
    }
    for (std::size_t j = 1; j <= 3; ++j) {
      knots.push_back(e[j]);
      values.push_back(m[k]);
    }
    knots.push_back(e[4]);
    values.push_back(k + 1 < grid.blocks() ? std::min(m[k], m[k + 1]) : m[k]);
  }
  return PiecewiseLinear(std::move(knots), std::move(values));
}

inline PiecewiseLinear zero_function(const Interval& iv) {
  if (iv.degenerate()) throw DomainError("approximant needs a non-degenerate interval");
  return PiecewiseLinear({iv.a, iv.b}, {0.0, 0.0});
}

/// f_n on iv. Block infima come from exact_bounds when f provides it, from
/// sampling otherwise. Throws DomainError if f is negative somewhere on the
/// sample grid, ResourceError for n above the level cap.
template <Integrand F>
PiecewiseLinear build_approximant(const F& f, const Interval& iv, int n,
                                  const SamplingConfig& cfg = {}) {
  if (n < 1) throw DomainError("approximant level n must be at least 1");
  if (n < kMinLemmaLevel) return zero_function(iv);
  const LemmaGrid grid(iv, n);
  const std::vector<double> m = block_infima(f, grid, cfg);
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] < 0.0) {
      std::ostringstream os;
      os.precision(17);
      os << "f must be nonnegative; infimum " << m[k] << " on block [" << grid.block_start(k)
         << ", " << grid.block_start(k + 1) << "]";
      throw DomainError(os.str());
    }
  }
  return approximant_from_levels(grid, m);
}

/// Bound M (b - a) / n on s(f, P_n) - integral of f_n.
inline double level_change_bound(double sup_f, const Interval& iv, int n) {
  return sup_f * iv.length() / static_cast<double>(n);
}

/// Bracket for the integral of |f - g| over iv.
template <Integrand F>
DarbouxEstimate l1_bracket(const F& f, const PiecewiseLinear& g, const Interval& iv, double tol,
                           const SamplingConfig& cfg = {}, const IntegrateOptions& opts = {}) {
  return integrate(AbsDifference<F, PiecewiseLinear>(f, g), iv, tol, cfg, opts);
}

/// Integral of |f - g| over iv to within tol (bracket midpoint, never negative).
template <Integrand F>
double l1_distance(const F& f, const PiecewiseLinear& g, const Interval& iv, double tol,
                   const SamplingConfig& cfg = {}, const IntegrateOptions& opts = {}) {
  return std::max(0.0, l1_bracket(f, g, iv, tol, cfg, opts).midpoint());
}

inline void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

/// Two-column CSV with header "knot,value"; '.' decimal separator regardless of locale.
inline void write_csv(std::ostream& os, const PiecewiseLinear& g) {
  std::string line;
  os << "knot,value\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    line.clear();
    append_number(line, g.knots()[i]);
    line.push_back(',');
    append_number(line, g.values()[i]);
    line.push_back('\n');
    os << line;
  }
}

}  // namespace quadratura
