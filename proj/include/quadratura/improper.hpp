#pragma once

// Substitution over open or infinite ranges, as the limit of proper
// truncations.
//
// The t range (alpha, beta) is truncated to [alpha_n, beta_n]: a finite end
// moves in by offset 2^-n, an infinite end sits at -/+ cutoff 2^n. On the x
// side a finite limit of phi is paired with phi(alpha_n) or phi(beta_n); an
// infinite limit uses its own cutoff sequence -/+ cutoff 2^n. Each side is
// accumulated incrementally: step n integrates only the two new end pieces
// and adds them to the running bracket.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "quadratura/changevar.hpp"
#include "quadratura/darboux.hpp"
#include "quadratura/errors.hpp"
#include "quadratura/expr.hpp"

namespace quadratura {

struct ImproperProblem {
  Expr f;
  Expr phi;
  double alpha = 0.0;  // may be -inf
  double beta = 1.0;   // may be +inf
  std::optional<Expr> phi_prime;
  // Limits of phi at alpha+ and beta-. Estimated from phi when absent.
  std::optional<double> a;
  std::optional<double> b;
};

struct ImproperSchedule {
  // Approach offset for finite t endpoints; NaN picks a quarter of the first
  // truncated range ([alpha, beta], [alpha, t_cutoff] or [-t_cutoff, beta]).
  double offset = std::numeric_limits<double>::quiet_NaN();
  double t_cutoff = 1.0;  // R for infinite t endpoints
  double x_cutoff = 1.0;  // R for infinite x limits
  int max_steps = 40;
  double tol = kDefaultTolerance;   // convergence: three consecutive values within tol
  double integration_tol = 1e-5;    // bracket width allowed per new piece
};

struct ImproperStep {
  int n = 0;
  double alpha_n = 0.0;
  double beta_n = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  DarbouxEstimate lhs;
  DarbouxEstimate rhs;
};

struct SideTrend {
  bool converged = false;
  bool closed = true;  // every piece reached its tolerance
  double extrapolated = std::numeric_limits<double>::quiet_NaN();
  double last = std::numeric_limits<double>::quiet_NaN();
  int converged_at = -1;
};

struct ImproperReport {
  std::vector<ImproperStep> steps;
  double a = 0.0;  // limit of phi at alpha+
  double b = 0.0;  // limit of phi at beta-
  SideTrend lhs;
  SideTrend rhs;
  double abs_diff = std::numeric_limits<double>::quiet_NaN();
  double tol = 0.0;
  Verdict verdict = Verdict::inconclusive;
  HypothesisReport hypotheses;  // on the first truncation
  std::string phi_prime_source;
  std::vector<std::string> notes;
};

namespace detail {

// Limit of phi at a finite t endpoint, approached from inside. Returns +/-inf
// when |phi| keeps doubling along the approach, NaN when nothing settles.
inline double endpoint_limit(const Expr& phi, double t, double dir, double offset) {
  std::vector<double> seq;
  for (int k = 10; k <= 40; k += 2) {
    const double v = phi(t + dir * offset * std::ldexp(1.0, -k));
    if (std::isfinite(v)) seq.push_back(v);
  }
  if (seq.size() < 4) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = seq.size();
  bool growing = std::fabs(seq[n - 1]) > 1e6;
  for (std::size_t i = n - 3; i < n; ++i)
    growing = growing && std::fabs(seq[i]) >= 2.0 * std::fabs(seq[i - 1]) &&
              (seq[i] > 0) == (seq[i - 1] > 0);
  if (growing) return seq.back() > 0 ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity();
  const double last = seq.back();
  const double tol = 1e-6 * (1.0 + std::fabs(last));
  if (std::fabs(seq[n - 1] - seq[n - 2]) <= tol && std::fabs(seq[n - 2] - seq[n - 3]) <= tol)
    return last;
  return std::numeric_limits<double>::quiet_NaN();
}

// Limit of phi as t -> +/-inf (dir is the sign of the infinity).
inline double infinite_limit(const Expr& phi, double dir) {
  std::vector<double> seq;
  for (int k = 10; k <= 60; k += 5) {
    const double v = phi(dir * std::ldexp(1.0, k));
    if (std::isfinite(v)) seq.push_back(v);
  }
  if (seq.size() < 4) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = seq.size();
  bool growing = std::fabs(seq[n - 1]) > 1e6;
  for (std::size_t i = n - 3; i < n; ++i)
    growing = growing && std::fabs(seq[i]) > 2.0 * std::fabs(seq[i - 1]);
  if (growing) return seq.back() > 0 ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity();
  const double last = seq.back();
  if (std::fabs(seq[n - 1] - seq[n - 2]) <= 1e-6 * (1.0 + std::fabs(last))) return last;
  return std::numeric_limits<double>::quiet_NaN();
}

// Aitken delta-squared on the last three values; falls back to the last value.
inline double aitken(double x0, double x1, double x2) {
  const double d1 = x1 - x0;
  const double d2 = x2 - x1;
  const double den = d2 - d1;
  if (den == 0.0 || !std::isfinite(den)) return x2;
  const double acc = x2 - d2 * d2 / den;
  // Only accept a correction of the size of the last step.
  if (!std::isfinite(acc) || std::fabs(acc - x2) > 4.0 * std::fabs(d2) + 1e-300) return x2;
  return acc;
}

inline SideTrend trend(const std::vector<double>& values, double tol, bool closed) {
  SideTrend t;
  t.closed = closed;
  if (values.empty()) return t;
  t.last = values.back();
  t.extrapolated = t.last;
  for (std::size_t i = 2; i < values.size(); ++i) {
    if (std::fabs(values[i] - values[i - 1]) < tol && std::fabs(values[i - 1] - values[i - 2]) < tol) {
      t.converged = true;
      t.converged_at = static_cast<int>(i);
      break;
    }
  }
  const std::size_t n = values.size();
  if (n >= 3) t.extrapolated = aitken(values[n - 3], values[n - 2], values[n - 1]);
  return t;
}

template <class G>
DarbouxEstimate piece(const G& g, double from, double to, double tol, const VerifyOptions& opts,
                      bool& closed, std::vector<std::string>& notes) {
  if (from == to) return {};
  try {
    return integrate_oriented(g, from, to, tol, opts.sampling, opts.integration);
  } catch (const NonConvergence& e) {
    closed = false;
    if (notes.size() < 8) notes.push_back(e.what());
    return from <= to ? e.last() : e.last().negated();
  }
}

}  // namespace detail

/// Runs the truncation schedule until both sides have converged (three
/// consecutive values within schedule.tol) or max_steps is reached. Verified
/// when both sides converged with closed brackets and their extrapolated
/// values differ by at most tol plus half the final bracket widths.
inline ImproperReport verify_improper(const ImproperProblem& p, const ImproperSchedule& s = {},
                                      const VerifyOptions& opts = {}) {
  if (std::isnan(p.alpha) || std::isnan(p.beta) || !(p.alpha < p.beta))
    throw DomainError("need alpha < beta");
  if (s.max_steps < 3) throw DomainError("the schedule needs at least three steps");
  if (!(s.tol > 0.0) || !(s.integration_tol > 0.0)) throw DomainError("tolerances must be positive");
  if (!(s.t_cutoff > 0.0) || !(s.x_cutoff > 0.0)) throw DomainError("cutoffs must be positive");

  const bool a_inf = std::isinf(p.alpha), b_inf = std::isinf(p.beta);
  double offset = s.offset;
  if (std::isnan(offset)) {
    // A quarter of the first truncated range: [alpha, beta], [alpha, R] or [-R, beta].
    double span = 4.0;
    if (!a_inf && !b_inf) span = p.beta - p.alpha;
    else if (!a_inf) span = s.t_cutoff - p.alpha;
    else if (!b_inf) span = p.beta + s.t_cutoff;
    offset = span > 0.0 ? 0.25 * span : 1.0;
  }
  if (!(offset > 0.0)) throw DomainError("approach offset must be positive");
  if (!a_inf && !b_inf && !(offset < 0.5 * (p.beta - p.alpha)))
    throw DomainError("approach offset must be below half the t range");

  auto t_lo = [&](int n) { return a_inf ? -s.t_cutoff * std::ldexp(1.0, n) : p.alpha + offset * std::ldexp(1.0, -n); };
  auto t_hi = [&](int n) { return b_inf ? s.t_cutoff * std::ldexp(1.0, n) : p.beta - offset * std::ldexp(1.0, -n); };
  if (!(t_lo(0) < t_hi(0))) throw DomainError("first truncation is empty; lower the offset or cutoff");

  ImproperReport r;
  r.tol = s.tol;
  r.a = p.a ? *p.a : (a_inf ? detail::infinite_limit(p.phi, -1.0) : detail::endpoint_limit(p.phi, p.alpha, +1.0, offset));
  r.b = p.b ? *p.b : (b_inf ? detail::infinite_limit(p.phi, +1.0) : detail::endpoint_limit(p.phi, p.beta, -1.0, offset));
  if (std::isnan(r.a) || std::isnan(r.b)) {
    r.notes.push_back("no limit of phi found at an endpoint; pass the x limits explicitly");
    return r;
  }

  SubstitutionProblem base{p.f, p.phi, t_lo(0), t_hi(0), p.phi_prime};
  const PhiPrime dphi = resolve_phi_prime(base, opts.finite_difference_fallback);
  r.phi_prime_source = dphi.describe();
  if (opts.check_hypotheses)
    r.hypotheses = check_hypotheses(base, opts.hypothesis_grid, opts.finite_difference_fallback);
  const SubstitutedIntegrand g(p.f, p.phi, dphi);

  // x truncation: paired with phi(t_n) for finite limits, cutoff otherwise.
  const double x_sign_lo = r.a < r.b ? -1.0 : 1.0;
  auto x_lo = [&](int n) { return std::isinf(r.a) ? x_sign_lo * s.x_cutoff * std::ldexp(1.0, n) : p.phi(t_lo(n)); };
  auto x_hi = [&](int n) { return std::isinf(r.b) ? -x_sign_lo * s.x_cutoff * std::ldexp(1.0, n) : p.phi(t_hi(n)); };

  bool lhs_closed = true, rhs_closed = true;
  std::vector<double> lhs_values, rhs_values;
  DarbouxEstimate lhs_acc, rhs_acc;
  const double itol = s.integration_tol;
  for (int n = 0; n < s.max_steps; ++n) {
    ImproperStep step;
    step.n = n;
    step.alpha_n = t_lo(n);
    step.beta_n = t_hi(n);
    step.x_lo = x_lo(n);
    step.x_hi = x_hi(n);
    if (!std::isfinite(step.x_lo) || !std::isfinite(step.x_hi) || !(step.alpha_n < step.beta_n)) {
      r.notes.push_back("truncation " + std::to_string(n) + " is not representable; schedule stopped");
      break;
    }
    if (n == 0) {
      rhs_acc = detail::piece(g, step.alpha_n, step.beta_n, itol, opts, rhs_closed, r.notes);
      lhs_acc = detail::piece(p.f, step.x_lo, step.x_hi, itol, opts, lhs_closed, r.notes);
    } else {
      const ImproperStep& prev = r.steps.back();
      rhs_acc = rhs_acc + detail::piece(g, step.alpha_n, prev.alpha_n, itol, opts, rhs_closed, r.notes) +
                detail::piece(g, prev.beta_n, step.beta_n, itol, opts, rhs_closed, r.notes);
      lhs_acc = lhs_acc + detail::piece(p.f, step.x_lo, prev.x_lo, itol, opts, lhs_closed, r.notes) +
                detail::piece(p.f, prev.x_hi, step.x_hi, itol, opts, lhs_closed, r.notes);
    }
    step.lhs = lhs_acc;
    step.rhs = rhs_acc;
    r.steps.push_back(step);
    lhs_values.push_back(lhs_acc.midpoint());
    rhs_values.push_back(rhs_acc.midpoint());

    r.lhs = detail::trend(lhs_values, s.tol, lhs_closed);
    r.rhs = detail::trend(rhs_values, s.tol, rhs_closed);
    if (r.lhs.converged && r.rhs.converged) break;
    if (!lhs_closed || !rhs_closed) break;
  }

  r.abs_diff = std::fabs(r.lhs.extrapolated - r.rhs.extrapolated);
  if (!r.lhs.converged) r.notes.push_back("lhs truncations did not converge");
  if (!r.rhs.converged) r.notes.push_back("rhs truncations did not converge");
  if (r.lhs.converged && r.rhs.converged && lhs_closed && rhs_closed) {
    const double slack = 0.5 * (r.steps.back().lhs.width() + r.steps.back().rhs.width());
    r.verdict = r.abs_diff <= s.tol + slack ? Verdict::verified : Verdict::mismatch;
  }
  return r;
}

}  // namespace quadratura
