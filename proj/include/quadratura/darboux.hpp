#pragma once

// Sampled lower/upper Darboux sums and a refinement-based integral bracket.
//
// The infimum and supremum of a black-box function over a cell are
// approximated by the extreme values over a grid of samples in that cell
// ("sampled Darboux"). This may overestimate the infimum and underestimate the
// supremum when the function oscillates below the sample spacing; raise
// SamplingConfig::samples_per_cell for such integrands. Integrands that model
// ExactBoundsHint bypass sampling and get true cell bounds.
//
// Where the integrand has a symbolic derivative, ranges of cells on which an
// interval enclosure of the derivative keeps one sign are monotone: their
// sampled extremes are the endpoint values, so only cell edges are evaluated.
//
// Undefined samples (NaN) are skipped when isolated, i.e. when the neighbouring
// samples on the global sample sequence are defined. This is how removable
// singularities and undefined endpoint derivatives are absorbed: the value of
// a Riemann integral does not depend on the integrand at finitely many points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "quadratura/errors.hpp"
#include "quadratura/integrand.hpp"
#include "quadratura/interval.hpp"
#include "quadratura/parallel.hpp"
#include "quadratura/partition.hpp"
#include "quadratura/simd.hpp"
#include "quadratura/summation.hpp"

namespace quadratura {

enum class UndefinedPolicy { skip_isolated, fail };

struct SamplingConfig {
  std::size_t samples_per_cell = 64;
  bool include_endpoints = true;
  UndefinedPolicy undefined_policy = UndefinedPolicy::skip_isolated;

  void validate() const {
    if (samples_per_cell < 2) throw DomainError("samples_per_cell must be at least 2");
  }
};

struct DarbouxEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double norm = 0.0;
  std::size_t cells = 0;

  double midpoint() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
  bool contains(double v) const { return lower <= v && v <= upper; }

  /// Bracket for the integral with reversed orientation.
  DarbouxEstimate negated() const { return {-upper, -lower, norm, cells}; }

  /// Bracket for the integral over the union of two adjacent ranges.
  friend DarbouxEstimate operator+(const DarbouxEstimate& x, const DarbouxEstimate& y) {
    return {x.lower + y.lower, x.upper + y.upper, std::max(x.norm, y.norm), x.cells + y.cells};
  }
};

/// The bracket did not close. Carries the last bracket computed.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, const DarbouxEstimate& last)
      : Error(what), last_(last) {}

  const DarbouxEstimate& last() const noexcept { return last_; }

 private:
  DarbouxEstimate last_;
};

struct IntegrateOptions {
  std::size_t min_cells = std::size_t{1} << 10;
  std::size_t max_cells = std::size_t{1} << 24;
  /// Give up before the cap when the observed width, extrapolated as 1/cells,
  /// cannot reach the tolerance within max_cells (with a factor 8 margin).
  bool early_abort = true;
};

namespace detail {

struct UniformLayout {
  Interval iv;
  std::size_t n;
  std::size_t cells() const { return n; }
  double edge(std::size_t i) const { return uniform_point(iv, i, n); }
};

struct PointsLayout {
  const std::vector<double>* pts;
  std::size_t cells() const { return pts->size() - 1; }
  double edge(std::size_t i) const { return (*pts)[i]; }
};

// Position of sample j in cell i.
template <class Layout>
double sample_at(const Layout& layout, const SamplingConfig& cfg, std::size_t i, std::size_t j) {
  const double e0 = layout.edge(i);
  const double e1 = layout.edge(i + 1);
  const double s = static_cast<double>(cfg.samples_per_cell);
  if (cfg.include_endpoints) {
    if (j + 1 == cfg.samples_per_cell) return e1;
    return e0 + static_cast<double>(j) * ((e1 - e0) / (s - 1.0));
  }
  return e0 + (static_cast<double>(j) + 0.5) * ((e1 - e0) / s);
}

struct ChunkSums {
  CompensatedSum lower;
  CompensatedSum upper;
  double norm = 0.0;
};

[[noreturn]] inline void undefined_sample(double x, bool isolated) {
  std::ostringstream os;
  os.precision(17);
  os << "integrand undefined at x = " << x
     << (isolated ? " (undefined samples rejected by policy)" : " (not an isolated point)");
  throw DomainError(os.str());
}

// Sampled bounds for cells [c0, c1) of the layout. `bounds` receives one
// entry per cell.
template <class F, class Layout>
void sampled_bounds(const F& f, const Layout& layout, const SamplingConfig& cfg, std::size_t c0,
                    std::size_t c1, std::vector<Bounds>& bounds) {
  const std::size_t s = cfg.samples_per_cell;
  const std::size_t stride = cfg.include_endpoints ? s - 1 : s;
  const std::size_t count = c1 - c0;
  const std::size_t own = cfg.include_endpoints ? count * stride + 1 : count * stride;
  const bool has_left = c0 > 0;
  const bool has_right = c1 < layout.cells();

  thread_local std::vector<double> xs;
  thread_local std::vector<double> vs;
  xs.resize(own + 2);
  vs.resize(own + 2);

  // Slot 0 and slot own+1 hold the neighbours outside this chunk.
  if (has_left) xs[0] = sample_at(layout, cfg, c0 - 1, cfg.include_endpoints ? s - 2 : s - 1);
  thread_local std::vector<double> jd;
  if (jd.size() != s) {
    jd.resize(s);
    for (std::size_t j = 0; j < s; ++j) jd[j] = static_cast<double>(j);
  }
  thread_local std::vector<double> edges;
  edges.resize(count + 1);
  for (std::size_t c = 0; c <= count; ++c) edges[c] = layout.edge(c0 + c);
  fill_samples(edges.data(), count, s, cfg.include_endpoints, jd.data(), xs.data() + 1);
  if (has_right) xs[own + 1] = sample_at(layout, cfg, c1, cfg.include_endpoints ? 1 : 0);

  const std::size_t first = has_left ? 0 : 1;
  const std::size_t last = has_right ? own + 2 : own + 1;
  evaluate(f, std::span<const double>(xs.data() + first, last - first),
           std::span<double>(vs.data() + first, last - first));
  if (!has_left) vs[0] = 0.0;
  if (!has_right) vs[own + 1] = 0.0;

  bounds.resize(count);
  for (std::size_t c = 0; c < count; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    if (minmax(vs.data() + 1 + c * stride, s, lo, hi)) {
      bounds[c] = {lo, hi};
      continue;
    }
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
    std::size_t defined = 0;
    for (std::size_t j = 0; j < s; ++j) {
      const std::size_t k = 1 + c * stride + j;
      const double v = vs[k];
      if (std::isnan(v)) {
        const bool isolated = !std::isnan(vs[k - 1]) && !std::isnan(vs[k + 1]);
        if (cfg.undefined_policy == UndefinedPolicy::fail || !isolated)
          undefined_sample(xs[k], isolated);
        continue;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++defined;
    }
    if (defined == 0) undefined_sample(xs[1 + c * stride], false);
    bounds[c] = {lo, hi};
  }
}

template <class F, class Layout>
void chunk_bounds(const F& f, const Layout& layout, const SamplingConfig& cfg, std::size_t c0,
                  std::size_t c1, std::vector<Bounds>& bounds) {
  if constexpr (ExactBoundsHint<F>) {
    bounds.resize(c1 - c0);
    bool all = true;
    for (std::size_t c = c0; c < c1; ++c) {
      const auto b = f.exact_bounds(layout.edge(c), layout.edge(c + 1));
      if (!b) {
        all = false;
        break;
      }
      bounds[c - c0] = *b;
    }
    if (all) return;
  }
  sampled_bounds(f, layout, cfg, c0, c1, bounds);
}

template <class F>
concept MonotoneCertifiable = requires(const F& f) {
  { f.monotone_certifier() } -> std::same_as<std::optional<MonotoneCertifier>>;
};

template <class F>
std::optional<MonotoneCertifier> certifier_for(const F& f) {
  if constexpr (std::same_as<F, Expr>) {
    return MonotoneCertifier::for_expr(f);
  } else if constexpr (MonotoneCertifiable<F>) {
    return f.monotone_certifier();
  } else {
    return std::nullopt;
  }
}

// Bisects cells [c0, c1) into ranges the certifier proves monotone; marks
// their cells in `mono` (indexed from `base`).
template <class Layout>
void mark_monotone(const MonotoneCertifier& cert, const Layout& layout, std::size_t c0,
                   std::size_t c1, std::size_t base, std::vector<char>& mono) {
  if (cert.monotone(layout.edge(c0), layout.edge(c1))) {
    std::fill(mono.begin() + static_cast<std::ptrdiff_t>(c0 - base),
              mono.begin() + static_cast<std::ptrdiff_t>(c1 - base), char{1});
    return;
  }
  if (c1 - c0 <= 4) return;  // sampling is cheaper than proving
  const std::size_t mid = c0 + (c1 - c0) / 2;
  mark_monotone(cert, layout, c0, mid, base, mono);
  mark_monotone(cert, layout, mid, c1, base, mono);
}

// Bounds for cells [c0, c1): endpoint values on cells flagged in `mono`
// (relative to c0), sampling on the rest and wherever an edge is undefined.
template <class F, class Layout>
void monotone_bounds(const F& f, const Layout& layout, const SamplingConfig& cfg, std::size_t c0,
                     std::size_t c1, const std::vector<char>& mono, std::vector<Bounds>& bounds) {
  const std::size_t count = c1 - c0;
  thread_local std::vector<double> edges;
  thread_local std::vector<double> values;
  thread_local std::vector<char> sample;
  thread_local std::vector<Bounds> run;
  edges.resize(count + 1);
  values.resize(count + 1);
  for (std::size_t c = 0; c <= count; ++c) edges[c] = layout.edge(c0 + c);
  evaluate(f, std::span<const double>(edges), std::span<double>(values));
  bounds.resize(count);
  sample.assign(count, 0);
  for (std::size_t c = 0; c < count; ++c) {
    const double a = values[c], b = values[c + 1];
    if (!mono[c] || std::isnan(a) || std::isnan(b)) {
      sample[c] = 1;
      continue;
    }
    bounds[c] = {std::min(a, b), std::max(a, b)};
  }
  for (std::size_t c = 0; c < count;) {
    if (!sample[c]) {
      ++c;
      continue;
    }
    std::size_t e = c;
    while (e < count && sample[e]) ++e;
    sampled_bounds(f, layout, cfg, c0 + c, c0 + e, run);
    std::copy(run.begin(), run.end(), bounds.begin() + static_cast<std::ptrdiff_t>(c));
    c = e;
  }
}

template <class F, class Layout>
DarbouxEstimate darboux_over(const F& f, const Layout& layout, const SamplingConfig& cfg) {
  cfg.validate();
  const std::size_t n = layout.cells();
  const std::size_t per_chunk = std::max<std::size_t>(1, 4096 / cfg.samples_per_cell);
  const std::size_t chunks = (n + per_chunk - 1) / per_chunk;
  std::vector<ChunkSums> partial(chunks);

  // Chunk-level certification, top down; 1 = whole chunk monotone.
  std::optional<MonotoneCertifier> cert;
  if constexpr (!ExactBoundsHint<F>) {
    if (cfg.include_endpoints) cert = certifier_for(f);
  }
  std::vector<char> chunk_mono;
  if (cert) {
    chunk_mono.assign(chunks, 0);
    // Recurse on chunk ranges, then expand to a per-chunk flag.
    auto mark = [&](auto&& self, std::size_t k0, std::size_t k1) -> void {
      if (cert->monotone(layout.edge(k0 * per_chunk), layout.edge(std::min(n, k1 * per_chunk)))) {
        std::fill(chunk_mono.begin() + static_cast<std::ptrdiff_t>(k0),
                  chunk_mono.begin() + static_cast<std::ptrdiff_t>(k1), char{1});
        return;
      }
      if (k1 - k0 == 1) return;
      const std::size_t mid = k0 + (k1 - k0) / 2;
      self(self, k0, mid);
      self(self, mid, k1);
    };
    mark(mark, 0, chunks);
  }

  parallel_for(chunks, [&](std::size_t ci) {
    const std::size_t c0 = ci * per_chunk;
    const std::size_t c1 = std::min(n, c0 + per_chunk);
    thread_local std::vector<Bounds> bounds;
    thread_local std::vector<char> mono;
    if (cert) {
      mono.assign(c1 - c0, chunk_mono[ci]);
      if (!chunk_mono[ci]) mark_monotone(*cert, layout, c0, c1, c0, mono);
      monotone_bounds(f, layout, cfg, c0, c1, mono, bounds);
    } else {
      chunk_bounds(f, layout, cfg, c0, c1, bounds);
    }
    ChunkSums& out = partial[ci];
    for (std::size_t c = c0; c < c1; ++c) {
      const double w = layout.edge(c + 1) - layout.edge(c);
      out.lower.add(bounds[c - c0].inf * w);
      out.upper.add(bounds[c - c0].sup * w);
      out.norm = std::max(out.norm, w);
    }
  });

  CompensatedSum lower;
  CompensatedSum upper;
  double norm = 0.0;
  for (const ChunkSums& p : partial) {
    lower.add(p.lower);
    upper.add(p.upper);
    norm = std::max(norm, p.norm);
  }
  return {lower.value(), upper.value(), norm, n};
}

}  // namespace detail

/// Approximate infimum and supremum of f over one cell.
template <Integrand F>
Bounds bounds_on(const F& f, const Interval& cell, const SamplingConfig& cfg = {}) {
  cfg.validate();
  if (cell.degenerate()) throw DomainError("bounds_on needs a non-degenerate cell");
  const std::vector<double> pts{cell.a, cell.b};
  std::vector<Bounds> out;
  detail::chunk_bounds(f, detail::PointsLayout{&pts}, cfg, 0, 1, out);
  return out.front();
}

template <Integrand F>
double infimum_on(const F& f, const Interval& cell, const SamplingConfig& cfg = {}) {
  return bounds_on(f, cell, cfg).inf;
}

template <Integrand F>
double supremum_on(const F& f, const Interval& cell, const SamplingConfig& cfg = {}) {
  return bounds_on(f, cell, cfg).sup;
}

/// Lower and upper sums over an arbitrary partition.
template <Integrand F>
DarbouxEstimate darboux_sums(const F& f, const Partition& p, const SamplingConfig& cfg = {}) {
  return detail::darboux_over(f, detail::PointsLayout{&p.points()}, cfg);
}

template <Integrand F>
double lower_sum(const F& f, const Partition& p, const SamplingConfig& cfg = {}) {
  return darboux_sums(f, p, cfg).lower;
}

template <Integrand F>
double upper_sum(const F& f, const Partition& p, const SamplingConfig& cfg = {}) {
  return darboux_sums(f, p, cfg).upper;
}

/// Sums over the uniform partition of iv into `cells` cells, without
/// materializing the partition.
template <Integrand F>
DarbouxEstimate uniform_darboux(const F& f, const Interval& iv, std::size_t cells,
                                const SamplingConfig& cfg = {}) {
  if (cells < 1) throw DomainError("need at least one cell");
  if (iv.degenerate()) throw DomainError("cannot partition a degenerate interval");
  return detail::darboux_over(f, detail::UniformLayout{iv, cells}, cfg);
}

/// Refines a uniform partition of iv until upper - lower <= tol. Starts at
/// opts.min_cells and multiplies the cell count by powers of two, jumping
/// directly to the level where a 1/cells extrapolation of the current width
/// meets tol. Throws NonConvergence at the cap. A degenerate interval yields
/// the zero bracket (cells = 0, norm = 0).
template <Integrand F>
DarbouxEstimate integrate(const F& f, const Interval& iv, double tol,
                          const SamplingConfig& cfg = {}, const IntegrateOptions& opts = {}) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  cfg.validate();
  if (iv.degenerate()) return {};
  const std::size_t cap = std::max<std::size_t>(1, opts.max_cells);
  std::size_t n = std::clamp<std::size_t>(opts.min_cells, 1, cap);
  for (;;) {
    const DarbouxEstimate est = uniform_darboux(f, iv, n, cfg);
    const double w = est.width();
    if (w <= tol) return est;

    std::ostringstream why;
    why.precision(6);
    if (!std::isfinite(w)) {
      why << "bracket is unbounded on [" << iv.a << ", " << iv.b << "] at " << n << " cells";
      throw NonConvergence(why.str(), est);
    }
    if (n >= cap) {
      why << "bracket width " << w << " exceeds tolerance " << tol << " at the cap of " << cap
          << " cells";
      throw NonConvergence(why.str(), est);
    }
    const double factor = w / tol;
    if (opts.early_abort && factor * static_cast<double>(n) > 8.0 * static_cast<double>(cap)) {
      why << "bracket width " << w << " at " << n << " cells cannot reach tolerance " << tol
          << " within " << cap << " cells";
      throw NonConvergence(why.str(), est);
    }
    std::size_t mult = 2;
    while (static_cast<double>(mult) < factor && n * mult < cap) mult *= 2;
    n = std::min(cap, n * mult);
  }
}

/// Signed integral from `from` to `to` (reversed orientation negates).
template <Integrand F>
DarbouxEstimate integrate_oriented(const F& f, double from, double to, double tol,
                                   const SamplingConfig& cfg = {},
                                   const IntegrateOptions& opts = {}) {
  if (from <= to) return integrate(f, Interval(from, to), tol, cfg, opts);
  return integrate(f, Interval(to, from), tol, cfg, opts).negated();
}

}  // namespace quadratura
