#pragma once

// Both sides of the substitution identity
//
//   integral from phi(alpha) to phi(beta) of f(x) dx
//     = integral from alpha to beta of f(phi(t)) phi'(t) dt
//
// computed as Darboux brackets, plus sampled diagnostics for the hypotheses
// under which the identity holds.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "quadratura/darboux.hpp"
#include "quadratura/errors.hpp"
#include "quadratura/expr.hpp"
#include "quadratura/integrand.hpp"
#include "quadratura/parser.hpp"
#include "quadratura/partition.hpp"
#include "quadratura/symbolic.hpp"

namespace quadratura {

struct SubstitutionProblem {
  Expr f;
  Expr phi;
  double alpha = 0.0;
  double beta = 1.0;
  std::optional<Expr> phi_prime;
};

enum class HypothesisVerdict { pass, fail, undecidable };

inline const char* to_string(HypothesisVerdict v) {
  switch (v) {
    case HypothesisVerdict::pass: return "pass";
    case HypothesisVerdict::fail: return "fail";
    case HypothesisVerdict::undecidable: return "undecidable-numerically";
  }
  return "?";
}

struct Sample {
  double at;
  double value;
};

/// Evidence behind a verdict: a short explanation and the samples it rests on.
struct Witness {
  std::string note;
  std::vector<Sample> samples;
};

struct Hypothesis {
  std::string name;
  HypothesisVerdict verdict = HypothesisVerdict::undecidable;
  Witness witness;
};

struct HypothesisReport {
  std::vector<Hypothesis> items;

  const Hypothesis* find(std::string_view name) const {
    for (const auto& h : items)
      if (h.name == name) return &h;
    return nullptr;
  }

  /// Verdict of `name`; undecidable if absent.
  HypothesisVerdict verdict(std::string_view name) const {
    const Hypothesis* h = find(name);
    return h ? h->verdict : HypothesisVerdict::undecidable;
  }
};

enum class Verdict { verified, mismatch, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::verified: return "verified";
    case Verdict::mismatch: return "mismatch";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// One side of the identity. `closed` is false when the bracket did not reach
/// its tolerance (the last bracket is kept) or could not be computed at all
/// (bounds are NaN and `error` says why).
struct SideResult {
  DarbouxEstimate estimate;
  bool closed = false;
  std::string error;

  double value() const { return estimate.midpoint(); }
};

struct SubstitutionReport {
  SideResult lhs;
  SideResult rhs;
  double phi_alpha = 0.0;
  double phi_beta = 0.0;
  double abs_diff = std::numeric_limits<double>::quiet_NaN();
  double tol = 0.0;
  HypothesisReport hypotheses;
  Verdict verdict = Verdict::inconclusive;
  std::string theorem;
  std::string phi_prime_source;
  std::vector<std::string> notes;
};

struct VerifyOptions {
  SamplingConfig sampling{};
  IntegrateOptions integration{};
  bool check_hypotheses = true;
  std::size_t hypothesis_grid = 1000;
  bool finite_difference_fallback = true;
};

inline constexpr double kDefaultTolerance = 1e-6;

/// phi' as used in the product: given, symbolic, or a central difference with
/// step 1e-7 (beta - alpha).
class PhiPrime {
 public:
  enum class Source { given, symbolic, finite_difference };

  PhiPrime(Expr derivative, Source source) : expr_(std::move(derivative)), source_(source) {}
  PhiPrime(Expr phi, double h) : expr_(std::move(phi)), source_(Source::finite_difference), h_(h) {}

  Source source() const { return source_; }
  const Expr& expr() const { return expr_; }
  double step() const { return h_; }

  std::string describe() const {
    switch (source_) {
      case Source::given: return "given: " + to_string(expr_);
      case Source::symbolic: return "symbolic: " + to_string(expr_);
      case Source::finite_difference: {
        std::ostringstream os;
        os.precision(3);
        os << "central difference, h = " << h_;
        return os.str();
      }
    }
    return {};
  }

  double operator()(double t) const {
    if (source_ != Source::finite_difference) return expr_(t);
    return (expr_(t + h_) - expr_(t - h_)) / (2.0 * h_);
  }

  void eval_batch(std::span<const double> ts, std::span<double> out) const {
    if (source_ != Source::finite_difference) {
      expr_.eval_batch(ts, out);
      return;
    }
    thread_local std::vector<double> shifted;
    thread_local std::vector<double> hi;
    shifted.resize(ts.size());
    hi.resize(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) shifted[i] = ts[i] + h_;
    expr_.eval_batch(shifted, hi);
    for (std::size_t i = 0; i < ts.size(); ++i) shifted[i] = ts[i] - h_;
    expr_.eval_batch(shifted, out);
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = (hi[i] - out[i]) / (2.0 * h_);
  }

 private:
  Expr expr_;
  Source source_;
  double h_ = 0.0;
};

/// Throws NotDifferentiable when phi has no symbolic derivative and the
/// finite-difference fallback is off.
inline PhiPrime resolve_phi_prime(const SubstitutionProblem& p, bool allow_fd = true) {
  if (p.phi_prime) return {*p.phi_prime, PhiPrime::Source::given};
  try {
    return {differentiate(p.phi, p.phi.variable_name()), PhiPrime::Source::symbolic};
  } catch (const NotDifferentiable&) {
    if (!allow_fd) throw;
  }
  const double span = std::isfinite(p.beta - p.alpha) ? p.beta - p.alpha : 1.0;
  return {p.phi, 1e-7 * span};
}

/// t -> f(phi(t)) * phi'(t).
class SubstitutedIntegrand {
 public:
  SubstitutedIntegrand(const Expr& f, const Expr& phi, const PhiPrime& dphi)
      : f_(f), phi_(phi), dphi_(dphi) {}

  double operator()(double t) const { return f_(phi_(t)) * dphi_(t); }

  /// Certifier for f(phi(t)) phi'(t) as one expression; none for a
  /// finite-difference phi'.
  std::optional<MonotoneCertifier> monotone_certifier() const {
    if (dphi_.source() == PhiPrime::Source::finite_difference) return std::nullopt;
    const Expr g = Expr::binary(BinaryOp::mul, compose(f_, f_.variable_name(), phi_), dphi_.expr());
    try {
      return MonotoneCertifier(g, differentiate(g, phi_.variable_name()));
    } catch (const NotDifferentiable&) {
      return std::nullopt;
    }
  }

  void eval_batch(std::span<const double> ts, std::span<double> out) const {
    thread_local std::vector<double> u;
    thread_local std::vector<double> fu;
    u.resize(ts.size());
    fu.resize(ts.size());
    phi_.eval_batch(ts, u);
    f_.eval_batch(u, fu);
    dphi_.eval_batch(ts, out);
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = fu[i] * out[i];
  }

 private:
  const Expr& f_;
  const Expr& phi_;
  const PhiPrime& dphi_;
};

/// t -> g(phi(t)) phi'(t) with g = f on J and zero elsewhere.
class RestrictedSubstitution {
 public:
  RestrictedSubstitution(const Expr& f, const Expr& phi, const PhiPrime& dphi, Interval J)
      : inner_(f, phi, dphi), phi_(phi), J_(J) {}

  double operator()(double t) const { return J_.contains(phi_(t)) ? inner_(t) : 0.0; }

  void eval_batch(std::span<const double> ts, std::span<double> out) const {
    thread_local std::vector<double> u;
    u.resize(ts.size());
    phi_.eval_batch(ts, u);
    inner_.eval_batch(ts, out);
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (!J_.contains(u[i])) out[i] = 0.0;
  }

 private:
  SubstitutedIntegrand inner_;
  const Expr& phi_;
  Interval J_;
};

namespace detail {

inline std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// Value of g at t, or its one-sided limit when g(t) is undefined there.
// `dir` is +1 to approach from the right, -1 from the left. Returns NaN when
// no limit is apparent.
template <class G>
double value_or_limit(const G& g, double t, double dir, double scale) {
  const double v = g(t);
  if (std::isfinite(v)) return v;
  std::vector<double> seq;
  for (int k = 3; k <= 15; ++k) {
    const double x = g(t + dir * scale * std::pow(10.0, -k));
    if (!std::isfinite(x)) continue;
    seq.push_back(x);
  }
  if (seq.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = seq.size();
  const double last = seq[n - 1];
  const double tol = 1e-8 * (1.0 + std::fabs(last));
  if (std::fabs(seq[n - 1] - seq[n - 2]) <= tol && std::fabs(seq[n - 2] - seq[n - 3]) <= tol)
    return last;
  return std::numeric_limits<double>::quiet_NaN();
}

inline std::vector<double> grid_points(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n + 1);
  const Interval iv(lo, hi);
  for (std::size_t i = 0; i <= n; ++i) xs[i] = uniform_point(iv, i, n);
  return xs;
}

template <class G>
std::vector<double> evaluate_grid(const G& g, const std::vector<double>& xs) {
  std::vector<double> vs(xs.size());
  evaluate(g, std::span<const double>(xs), std::span<double>(vs));
  return vs;
}

struct ZoomResult {
  bool unbounded = false;
  bool nonfinite = false;
  double growth = 1.0;
  std::vector<Sample> trail;  // (window radius, max |g| in window)
  double center = 0.0;
};

// Max |g| over shrinking windows around c. Unbounded when a non-finite value
// shows up away from c, or when the window maximum grows by 10x or more over
// the last three decades of radius.
template <class G>
ZoomResult zoom_probe(const G& g, double c, double lo, double hi) {
  constexpr int kLevels = 12;
  constexpr int kSamples = 64;
  ZoomResult out;
  out.center = c;
  const double span = hi - lo;
  std::vector<double> xs;
  std::vector<double> vs;
  for (int level = 1; level <= kLevels; ++level) {
    const double r = span * std::pow(10.0, -level);
    const double a = std::max(lo, c - r);
    const double b = std::min(hi, c + r);
    xs.clear();
    for (int j = 0; j <= kSamples; ++j) {
      const double x = a + (b - a) * (static_cast<double>(j) / kSamples);
      if (x != c) xs.push_back(x);
    }
    vs.resize(xs.size());
    evaluate(g, std::span<const double>(xs), std::span<double>(vs));
    double m = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (std::isinf(vs[i])) {
        out.unbounded = out.nonfinite = true;
        out.trail.push_back({xs[i], vs[i]});
        return out;
      }
      if (!std::isnan(vs[i])) m = std::max(m, std::fabs(vs[i]));
    }
    out.trail.push_back({r, m});
  }
  const std::size_t n = out.trail.size();
  const double before = out.trail[n - 4].value;
  const double after = out.trail[n - 1].value;
  if (before > 0.0)
    out.growth = after / before;
  else
    out.growth = after > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  out.unbounded = out.growth >= 10.0;
  return out;
}

inline constexpr double kOverflowThreshold = 1e300;

// Boundedness of g on [lo, hi]: grid maximum below the overflow threshold and
// no divergence trend at the endpoints, at undefined grid points, or at the
// grid argmax.
template <class G>
Hypothesis check_bounded(std::string name, const G& g, double lo, double hi, std::size_t grid) {
  Hypothesis h{std::move(name), HypothesisVerdict::pass, {}};
  const auto xs = grid_points(lo, hi, grid);
  const auto vs = evaluate_grid(g, xs);
  double peak = 0.0;
  std::size_t arg = 0;
  std::vector<double> centers{lo, hi};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::isnan(vs[i]) || std::isinf(vs[i])) {
      if (centers.size() < 16) centers.push_back(xs[i]);
      continue;
    }
    if (std::fabs(vs[i]) > peak) {
      peak = std::fabs(vs[i]);
      arg = i;
    }
  }
  centers.push_back(xs[arg]);
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());

  if (peak > kOverflowThreshold) {
    h.verdict = HypothesisVerdict::fail;
    h.witness.note = "grid maximum " + fmt(peak) + " exceeds the overflow threshold";
    h.witness.samples.push_back({xs[arg], vs[arg]});
    return h;
  }
  for (double c : centers) {
    ZoomResult z = zoom_probe(g, c, lo, hi);
    if (z.unbounded) {
      h.verdict = HypothesisVerdict::fail;
      h.witness.note = "values grow without bound near " + fmt(c, 17) +
                       (z.nonfinite ? std::string(" (non-finite value)")
                                    : " (max |value| grew by " + fmt(z.growth, 3) +
                                          "x over the last three decades of window radius)");
      h.witness.samples = std::move(z.trail);
      return h;
    }
  }
  h.witness.note = "max |value| " + fmt(peak) + " on a " + std::to_string(grid) +
                   "-cell grid; no growth near " + std::to_string(centers.size()) +
                   " probe points";
  h.witness.samples.push_back({xs[arg], vs[arg]});
  return h;
}

// Largest jump between consecutive defined grid values.
inline double modulus_on_grid(const std::vector<double>& vs) {
  double w = 0.0;
  for (std::size_t i = 1; i < vs.size(); ++i)
    if (std::isfinite(vs[i]) && std::isfinite(vs[i - 1])) w = std::max(w, std::fabs(vs[i] - vs[i - 1]));
  return w;
}

// Continuity: the sampled modulus of continuity shrinks (at least halves)
// when the grid is refined tenfold.
template <class G>
Hypothesis check_continuous(std::string name, const G& g, double lo, double hi, std::size_t grid) {
  Hypothesis h{std::move(name), HypothesisVerdict::pass, {}};
  const auto coarse = evaluate_grid(g, grid_points(lo, hi, grid));
  const auto fine = evaluate_grid(g, grid_points(lo, hi, 10 * grid));
  std::size_t undefined = 0;
  for (double v : fine) undefined += std::isfinite(v) ? 0 : 1;
  const double w1 = modulus_on_grid(coarse);
  const double w2 = modulus_on_grid(fine);
  double scale = 0.0;
  for (double v : fine)
    if (std::isfinite(v)) scale = std::max(scale, std::fabs(v));
  h.witness.samples = {{static_cast<double>(grid), w1}, {static_cast<double>(10 * grid), w2}};
  if (undefined > 2) {
    h.verdict = HypothesisVerdict::fail;
    h.witness.note = std::to_string(undefined) + " undefined values on the refined grid";
    return h;
  }
  const bool tiny = w2 <= 1e-12 * (1.0 + scale);
  if (w2 <= 0.5 * w1 || tiny) {
    h.witness.note = "modulus of continuity " + fmt(w1) + " -> " + fmt(w2) + " under 10x refinement";
  } else {
    h.verdict = HypothesisVerdict::fail;
    h.witness.note = "modulus of continuity does not shrink: " + fmt(w1) + " -> " + fmt(w2);
  }
  return h;
}

inline Hypothesis undecidable(std::string name, std::string why) {
  return {std::move(name), HypothesisVerdict::undecidable, {std::move(why), {}}};
}

}  // namespace detail

/// phi(alpha) and phi(beta), using one-sided limits where phi is undefined at
/// an endpoint. NaN when neither is available.
inline std::pair<double, double> endpoint_images(const SubstitutionProblem& p) {
  const double span = p.beta - p.alpha;
  return {detail::value_or_limit(p.phi, p.alpha, +1.0, span),
          detail::value_or_limit(p.phi, p.beta, -1.0, span)};
}

inline void validate(const SubstitutionProblem& p) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta))
    throw DomainError("alpha and beta must be finite; use the improper driver for open ends");
  if (!(p.alpha < p.beta)) throw DomainError("need alpha < beta");
}

/// Sampled hypothesis diagnostics on a grid of `grid_size` cells (at least 100).
inline HypothesisReport check_hypotheses(const SubstitutionProblem& p, std::size_t grid_size = 1000,
                                         bool allow_fd = true) {
  validate(p);
  if (grid_size < 100) throw DomainError("hypothesis grid needs at least 100 cells");
  using detail::undecidable;
  HypothesisReport r;
  const double lo = p.alpha, hi = p.beta;

  // Continuity of phi, with endpoint limits standing in for undefined ends.
  const std::pair<double, double> images = endpoint_images(p);
  const double pa = images.first, pb = images.second;
  auto phi_ext = [&](double t) {
    if (t == lo) return pa;
    if (t == hi) return pb;
    return p.phi(t);
  };
  r.items.push_back(detail::check_continuous("phi_continuous", phi_ext, lo, hi, grid_size));

  std::optional<PhiPrime> dphi;
  try {
    dphi.emplace(resolve_phi_prime(p, allow_fd));
  } catch (const NotDifferentiable& e) {
    r.items.push_back(undecidable("phi_differentiable_interior", e.what()));
  }
  if (dphi) {
    Hypothesis d{"phi_differentiable_interior", HypothesisVerdict::pass, {}};
    const auto xs = detail::grid_points(lo, hi, grid_size);
    const auto vs = detail::evaluate_grid(*dphi, xs);
    std::size_t peak = 1;
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      if (!std::isfinite(vs[i]) && d.witness.samples.size() < 16) d.witness.samples.push_back({xs[i], vs[i]});
      if (std::fabs(vs[i]) > std::fabs(vs[peak])) peak = i;
    }
    if (!d.witness.samples.empty()) {
      d.verdict = HypothesisVerdict::fail;
      d.witness.note = "phi' undefined at interior grid points";
    } else {
      d.witness.samples.push_back({xs[peak], vs[peak]});
      d.witness.note = "phi' finite at every interior grid point (" + dphi->describe() + "); largest |phi'| shown";
    }
    r.items.push_back(std::move(d));

    r.items.push_back(detail::check_bounded("phi_prime_bounded", *dphi, lo, hi, grid_size));
    const SubstitutedIntegrand product(p.f, p.phi, *dphi);
    r.items.push_back(detail::check_bounded("product_bounded", product, lo, hi, grid_size));
  }

  if (std::isfinite(pa) && std::isfinite(pb)) {
    const double jlo = std::min(pa, pb), jhi = std::max(pa, pb);
    if (jlo < jhi) {
      r.items.push_back(detail::check_bounded("f_bounded_on_J", p.f, jlo, jhi, grid_size));
    } else {
      Hypothesis h{"f_bounded_on_J", HypothesisVerdict::pass, {"J is a single point", {{jlo, p.f(jlo)}}}};
      r.items.push_back(std::move(h));
    }

    // phi maps into J with phi(alpha), phi(beta) at the ends of J.
    Hypothesis e{"endpoint_conditions", HypothesisVerdict::pass, {}};
    const auto xs = detail::grid_points(lo, hi, 10 * grid_size);
    const auto vs = detail::evaluate_grid(p.phi, xs);
    const double slack = 1e-12 * (1.0 + std::max(std::fabs(jlo), std::fabs(jhi)));
    std::size_t lo_at = 0, hi_at = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (std::isnan(vs[i])) continue;
      if (std::isnan(vs[lo_at]) || vs[i] < vs[lo_at]) lo_at = i;
      if (std::isnan(vs[hi_at]) || vs[i] > vs[hi_at]) hi_at = i;
      if (vs[i] < jlo - slack || vs[i] > jhi + slack) {
        if (e.witness.samples.size() < 8) e.witness.samples.push_back({xs[i], vs[i]});
        e.verdict = HypothesisVerdict::fail;
      }
    }
    if (e.verdict == HypothesisVerdict::pass) {
      e.witness.samples.push_back({xs[lo_at], vs[lo_at]});
      e.witness.samples.push_back({xs[hi_at], vs[hi_at]});
    }
    e.witness.note = e.verdict == HypothesisVerdict::pass
                         ? "phi stays within J = [" + detail::fmt(jlo, 17) + ", " + detail::fmt(jhi, 17) + "]"
                         : "phi leaves J = [" + detail::fmt(jlo, 17) + ", " + detail::fmt(jhi, 17) + "]";
    r.items.push_back(std::move(e));
  } else {
    r.items.push_back(undecidable("f_bounded_on_J", "phi(alpha) or phi(beta) is undefined"));
    r.items.push_back(undecidable("endpoint_conditions", "phi(alpha) or phi(beta) is undefined"));
  }

  r.items.push_back(undecidable("phi_prime_continuous_ae", "a.e. continuity is not decidable from samples"));
  r.items.push_back(undecidable("f_continuous_ae", "a.e. continuity is not decidable from samples"));
  r.items.push_back(undecidable("preimage_of_endpoints_null", "measure-zero conditions are not decidable from samples"));
  return r;
}

namespace detail {

template <class F>
SideResult run_side(const F& g, double from, double to, double tol, const VerifyOptions& opts) {
  SideResult s;
  try {
    s.estimate = integrate_oriented(g, from, to, tol, opts.sampling, opts.integration);
    s.closed = true;
  } catch (const NonConvergence& e) {
    s.estimate = from <= to ? e.last() : e.last().negated();
    s.error = e.what();
  } catch (const Error& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.estimate = {nan, nan, nan, 0};
    s.error = e.what();
  }
  return s;
}

inline Verdict decide(const SideResult& lhs, const SideResult& rhs, double abs_diff, double tol) {
  if (!lhs.closed || !rhs.closed || std::isnan(abs_diff)) return Verdict::inconclusive;
  return abs_diff <= tol ? Verdict::verified : Verdict::mismatch;
}

inline std::string theorem_tag(const HypothesisReport& h) {
  if (h.verdict("endpoint_conditions") == HypothesisVerdict::pass) return "theorem-3";
  if (h.verdict("f_bounded_on_J") == HypothesisVerdict::pass) return "corollary-2";
  return "theorem-1";
}

}  // namespace detail

/// Signed integral of f from phi(alpha) to phi(beta).
inline SideResult lhs_integral(const SubstitutionProblem& p, double tol, const VerifyOptions& opts = {}) {
  validate(p);
  const auto [pa, pb] = endpoint_images(p);
  if (!std::isfinite(pa) || !std::isfinite(pb)) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {{nan, nan, nan, 0}, false, "phi has no finite value or limit at an endpoint"};
  }
  return detail::run_side(p.f, pa, pb, tol, opts);
}

/// Integral of f(phi(t)) phi'(t) over [alpha, beta].
inline SideResult rhs_integral(const SubstitutionProblem& p, double tol, const VerifyOptions& opts = {}) {
  validate(p);
  const PhiPrime dphi = resolve_phi_prime(p, opts.finite_difference_fallback);
  const SubstitutedIntegrand g(p.f, p.phi, dphi);
  return detail::run_side(g, p.alpha, p.beta, tol, opts);
}

/// Runs both sides at tol/2 and compares midpoints.
inline SubstitutionReport verify(const SubstitutionProblem& p, double tol = kDefaultTolerance,
                                 const VerifyOptions& opts = {}) {
  validate(p);
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  SubstitutionReport r;
  r.tol = tol;
  std::tie(r.phi_alpha, r.phi_beta) = endpoint_images(p);
  r.lhs = lhs_integral(p, 0.5 * tol, opts);
  try {
    const PhiPrime dphi = resolve_phi_prime(p, opts.finite_difference_fallback);
    r.phi_prime_source = dphi.describe();
    const SubstitutedIntegrand g(p.f, p.phi, dphi);
    r.rhs = detail::run_side(g, p.alpha, p.beta, 0.5 * tol, opts);
  } catch (const NotDifferentiable& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.rhs = {{nan, nan, nan, 0}, false, e.what()};
  }
  if (!r.lhs.error.empty()) r.notes.push_back("lhs: " + r.lhs.error);
  if (!r.rhs.error.empty()) r.notes.push_back("rhs: " + r.rhs.error);
  r.abs_diff = std::fabs(r.lhs.value() - r.rhs.value());
  r.verdict = detail::decide(r.lhs, r.rhs, r.abs_diff, tol);
  if (opts.check_hypotheses) {
    r.hypotheses = check_hypotheses(p, opts.hypothesis_grid, opts.finite_difference_fallback);
    r.theorem = detail::theorem_tag(r.hypotheses);
  }
  return r;
}

/// The four integrals of the zero-extension identity: f and g = f on J (zero
/// elsewhere) over J, and f(phi) phi' and g(phi) phi' over [alpha, beta].
/// Assumes the preimage of {phi(alpha), phi(beta)} is a null set.
struct ZeroExtensionReport {
  SideResult f_over_J;
  SideResult g_over_J;
  SideResult f_substituted;
  SideResult g_substituted;
  double max_spread = std::numeric_limits<double>::quiet_NaN();
  double tol = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> notes;

  std::array<const SideResult*, 4> sides() const {
    return {&f_over_J, &g_over_J, &f_substituted, &g_substituted};
  }
};

inline ZeroExtensionReport corollary1_verify(const SubstitutionProblem& p,
                                             double tol = kDefaultTolerance,
                                             const VerifyOptions& opts = {}) {
  validate(p);
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  ZeroExtensionReport r;
  r.tol = tol;
  const auto [pa, pb] = endpoint_images(p);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const SideResult missing{{nan, nan, nan, 0}, false, "phi has no finite value or limit at an endpoint"};
  const double side_tol = 0.5 * tol;
  if (std::isfinite(pa) && std::isfinite(pb)) {
    const Interval J(std::min(pa, pb), std::max(pa, pb));
    const RestrictedTo<Expr> g(p.f, J);
    r.f_over_J = detail::run_side(p.f, pa, pb, side_tol, opts);
    r.g_over_J = detail::run_side(g, pa, pb, side_tol, opts);
    const PhiPrime dphi = resolve_phi_prime(p, opts.finite_difference_fallback);
    r.f_substituted = detail::run_side(SubstitutedIntegrand(p.f, p.phi, dphi), p.alpha, p.beta, side_tol, opts);
    r.g_substituted = detail::run_side(RestrictedSubstitution(p.f, p.phi, dphi, J), p.alpha,
                                       p.beta, side_tol, opts);
  } else {
    r.f_over_J = r.g_over_J = r.f_substituted = r.g_substituted = missing;
  }

  bool closed = true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const SideResult* s : r.sides()) {
    closed = closed && s->closed;
    if (!s->error.empty()) r.notes.push_back(s->error);
    lo = std::min(lo, s->value());
    hi = std::max(hi, s->value());
  }
  r.max_spread = hi - lo;
  if (closed && !std::isnan(r.max_spread))
    r.verdict = r.max_spread <= tol ? Verdict::verified : Verdict::mismatch;
  return r;
}

}  // namespace quadratura
