// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace quadratura;

namespace {

const double kPi = std::numbers::pi;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s >= limit_s) {
    o.ok = false;
    o.detail << " [runtime " << s << " s over " << limit_s << " s]";
  }
  if (!o.ok) ++failures;
  std::printf("%s %d %s (%.3f s)%s\n", o.ok ? "PASS" : "FAIL", id, title, s, o.detail.str().c_str());
  std::fflush(stdout);
}

SubstitutionProblem problem(const char* f, const char* phi, double a, double b) {
  return {parse(f), parse(phi), a, b, std::nullopt};
}

}  // namespace

int main() {
  criterion(1, "second example: both sides within 1e-7 of pi/8, verified", 1.0, [](Outcome& o) {
    const SubstitutionReport r = verify(problem("x/(x^4+1)", "sqrt(t)", 0, 1), 1e-7);
    o.detail << " lhs=" << r.lhs.value() << " rhs=" << r.rhs.value();
    o.require(r.verdict == Verdict::verified, "verdict");
    o.require(std::fabs(r.lhs.value() - kPi / 8) <= 1e-7, "lhs");
    o.require(std::fabs(r.rhs.value() - kPi / 8) <= 1e-7, "rhs");
  });

  criterion(2, "first example: within 5e-4 of 4/pi^4, phi' unbounded, product bounded", 10.0,
            [](Outcome& o) {
              const double exact = 4 / std::pow(kPi, 4);
              const SubstitutionReport r = verify(problem("x^3", "t*sin(1/t)", 0, 2 / kPi), 5e-4);
              o.detail << " lhs=" << r.lhs.value() << " rhs=" << r.rhs.value();
              o.require(std::fabs(r.lhs.value() - exact) <= 5e-4, "lhs");
              o.require(std::fabs(r.rhs.value() - exact) <= 5e-4, "rhs");
              o.require(r.hypotheses.verdict("phi_prime_bounded") == HypothesisVerdict::fail,
                        "phi_prime_bounded should fail");
              o.require(r.hypotheses.verdict("product_bounded") == HypothesisVerdict::pass,
                        "product_bounded should pass");
            });

  criterion(3, "third example: rhs to pi within 1e-9, lhs at R=2000 within 1.5e-3", 5.0,
            [](Outcome& o) {
              ImproperSchedule s;
              s.x_cutoff = 2000.0 / 1024;
              s.tol = 1e-10;
              s.max_steps = 40;
              const ImproperProblem p{parse("1/(x^2+1)"), parse("tan(theta)"), -kPi / 2, kPi / 2,
                                      std::nullopt, std::nullopt, std::nullopt};
              const ImproperReport r = verify_improper(p, s);
              o.require(r.steps.size() > 10, "fewer than 11 steps");
              if (r.steps.size() > 10) {
                const ImproperStep& st = r.steps[10];
                o.detail << " R=" << st.x_hi << " lhs(R)=" << st.lhs.midpoint();
                o.require(st.x_hi == 2000.0 && st.x_lo == -2000.0, "cutoff");
                o.require(std::fabs(st.lhs.midpoint() - kPi) <= 1.5e-3, "lhs at R=2000");
              }
              o.detail << " rhs=" << r.rhs.last << " steps=" << r.steps.size();
              o.require(r.rhs.converged, "rhs converged");
              o.require(std::fabs(r.rhs.last - kPi) <= 1e-9, "rhs limit");
            });

  criterion(4, "approximant properties on the battery", 30.0, [](Outcome& o) {
    std::size_t violations = 0, bound_failures = 0;
    double worst_l1 = 0.0;
    for (const auto& m : qt::battery()) {
      for (int n = 3; n <= 12; ++n) {
        const PiecewiseLinear g = build_approximant(m.f, {0, 1}, n);
        for (int i = 0; i <= 10000; ++i) {
          const double x = i / 10000.0;
          const double v = eval_pl(g, x);
          if (v < 0.0 || v > m.f(x)) ++violations;
        }
        const double s = lower_sum(m.f, LemmaGrid({0, 1}, n).block_partition());
        const double gap = s - integrate_pl(g);
        if (gap < -1e-15 || gap > level_change_bound(m.sup, {0, 1}, n)) ++bound_failures;
        if (n == 12 && m.continuous) {
          const double d = l1_distance(m.f, g, {0, 1}, 1e-5);
          worst_l1 = std::max(worst_l1, d);
        }
      }
    }
    o.detail << " violations=" << violations << " bound_failures=" << bound_failures
             << " worst_l1=" << worst_l1;
    o.require(violations == 0, "below-approximation");
    o.require(bound_failures == 0, "level-change bound");
    o.require(worst_l1 < 0.02, "l1 at n=12");
  });

  criterion(5, "symbolic derivatives match central differences within 1e-6", 10.0, [](Outcome& o) {
    double worst = 0.0;
    std::uint64_t seed = 1;
    for (const auto& c : qt::gallery_derivative_cases()) {
      const double d = qt::max_derivative_deviation(c, seed++);
      if (d > 1e-6) o.detail << " " << c.text << "=" << d;
      worst = std::max(worst, d);
    }
    o.detail << " worst=" << worst;
    o.require(worst <= 1e-6, "deviation");
  });

  criterion(6, "Darboux brackets sound at every level; Lipschitz gap bound", 30.0, [](Outcome& o) {
    std::size_t unsound = 0, gap_failures = 0;
    for (const auto& m : qt::battery()) {
      for (int k = 0; k <= 16; ++k) {
        const DarbouxEstimate e = uniform_darboux(m.f, {0, 1}, std::size_t{1} << k);
        if (!(e.lower <= m.integral && m.integral <= e.upper)) ++unsound;
        if (m.lipschitz && e.width() > *m.lipschitz * 1.0 * e.norm * (1 + 1e-12)) ++gap_failures;
      }
    }
    o.detail << " unsound=" << unsound << " gap_failures=" << gap_failures;
    o.require(unsound == 0, "soundness");
    o.require(gap_failures == 0, "Lipschitz gap");
  });

  criterion(7, "affine substitution oracle, 20 random cases within 1e-9", 30.0, [](Outcome& o) {
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> coef(-3, 3), slope(0.2, 3.0), shift(-2, 2);
    std::uniform_int_distribution<int> degree(0, 4);
    VerifyOptions opts;
    opts.check_hypotheses = false;
    // Point estimates at a 2^20-cell floor; a 1e-9 bracket width is beyond the cell cap.
    opts.integration.min_cells = std::size_t{1} << 20;
    double worst = 0.0;
    int reversed = 0, unverified = 0;
    for (int i = 0; i < 20; ++i) {
      std::vector<double> c(static_cast<std::size_t>(degree(rng)) + 1);
      for (auto& v : c) v = coef(rng);
      const double m = (i % 2 ? -1.0 : 1.0) * slope(rng);
      const double k = shift(rng);
      reversed += m < 0;
      const std::string phi = "(" + detail::format_number(m) + ")*t + (" + detail::format_number(k) + ")";
      const SubstitutionProblem p{parse(qt::poly_text(c, "x"), "x"), parse(phi, "t"), 0.0, 1.0,
                                  std::nullopt};
      const double exact = qt::poly_antiderivative(c, m + k) - qt::poly_antiderivative(c, k);
      const SubstitutionReport r = verify(p, 1e-3, opts);
      if (r.verdict != Verdict::verified) ++unverified;
      worst = std::max({worst, std::fabs(r.lhs.value() - exact), std::fabs(r.rhs.value() - exact)});
    }
    o.detail << " worst=" << worst << " reversed=" << reversed << " unverified=" << unverified;
    o.require(unverified == 0, "verdict");
    o.require(worst <= 1e-9, "oracle");
    o.require(reversed > 0, "no m < 0 case");
  });

  std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
