#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "support.hpp"

using namespace quadratura;

namespace {

const double kPi = std::numbers::pi;
const double kInf = std::numeric_limits<double>::infinity();

ImproperProblem improper(const char* f, const char* phi, double alpha, double beta) {
  return {parse(f), parse(phi), alpha, beta, std::nullopt, std::nullopt, std::nullopt};
}

}  // namespace

TEST(Improper, TangentExample) {
  ImproperSchedule s;
  s.x_cutoff = 2000.0 / 1024;  // R = 2000 at step 10
  s.tol = 1e-10;
  s.max_steps = 40;
  VerifyOptions opts;
  opts.check_hypotheses = false;
  const ImproperReport r = verify_improper(improper("1/(x^2+1)", "tan(theta)", -kPi / 2, kPi / 2), s, opts);
  EXPECT_EQ(r.a, -kInf);
  EXPECT_EQ(r.b, kInf);
  ASSERT_GT(r.steps.size(), 10u);
  EXPECT_DOUBLE_EQ(r.steps[10].x_hi, 2000.0);
  EXPECT_DOUBLE_EQ(r.steps[10].x_lo, -2000.0);
  EXPECT_NEAR(r.steps[10].lhs.midpoint(), kPi, 1.5e-3);
  // The substituted integrand is identically 1: step n is pi - 2 delta_n.
  for (const ImproperStep& st : r.steps)
    EXPECT_NEAR(st.rhs.midpoint(), kPi - 2 * (kPi / 4) * std::ldexp(1.0, -st.n), 1e-12) << st.n;
  EXPECT_TRUE(r.rhs.converged);
  EXPECT_NEAR(r.rhs.last, kPi, 1e-9);
}

TEST(Improper, SteepStartSquareRoot) {
  const ImproperReport r = verify_improper(improper("1/sqrt(x)", "t^2", 0, 1));
  EXPECT_EQ(r.verdict, Verdict::verified);
  EXPECT_NEAR(r.a, 0.0, 1e-12);
  EXPECT_NEAR(r.b, 1.0, 1e-12);
  EXPECT_NEAR(r.lhs.extrapolated, 2.0, 1e-5);
  EXPECT_NEAR(r.rhs.extrapolated, 2.0, 1e-5);
}

TEST(Improper, ProperIntegralMatchesIntegrate) {
  const ImproperReport r = verify_improper(improper("x^2", "t", 0, 1));
  EXPECT_EQ(r.verdict, Verdict::verified);
  const DarbouxEstimate direct = integrate(parse("x^2"), {0, 1}, 1e-6);
  EXPECT_NEAR(r.lhs.extrapolated, direct.midpoint(), 1e-5);
  EXPECT_NEAR(r.rhs.extrapolated, direct.midpoint(), 1e-5);
}

TEST(Improper, InfiniteParameterRange) {
  const ImproperReport r = verify_improper(improper("exp(-x)", "t", 0, kInf));
  EXPECT_EQ(r.b, kInf);
  EXPECT_EQ(r.verdict, Verdict::verified);
  EXPECT_NEAR(r.lhs.extrapolated, 1.0, 1e-5);
  EXPECT_NEAR(r.rhs.extrapolated, 1.0, 1e-5);
}

TEST(Improper, ExplicitLimitsOverrideEstimates) {
  ImproperProblem p = improper("1/sqrt(x)", "t^2", 0, 1);
  p.a = 0.0;
  p.b = 1.0;
  const ImproperReport r = verify_improper(p);
  EXPECT_EQ(r.a, 0.0);
  EXPECT_EQ(r.b, 1.0);
}

TEST(Improper, ExhaustedScheduleIsInconclusive) {
  ImproperSchedule s;
  s.max_steps = 3;
  s.tol = 1e-12;
  const ImproperReport r = verify_improper(improper("1/sqrt(x)", "t^2", 0, 1), s);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  EXPECT_EQ(r.steps.size(), 3u);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Improper, StepsAreNested) {
  const ImproperReport r = verify_improper(improper("1/sqrt(x)", "t^2", 0, 1));
  for (std::size_t i = 1; i < r.steps.size(); ++i) {
    EXPECT_LT(r.steps[i].alpha_n, r.steps[i - 1].alpha_n);
    EXPECT_GT(r.steps[i].beta_n, r.steps[i - 1].beta_n);
    EXPECT_EQ(r.steps[i].n, static_cast<int>(i));
  }
}

TEST(Improper, HalfInfiniteDefaultOffset) {
  const ImproperReport r = verify_improper(improper("exp(x)", "t", -kInf, 0));
  EXPECT_EQ(r.a, -kInf);
  ASSERT_FALSE(r.steps.empty());
  EXPECT_EQ(r.steps[0].alpha_n, -1.0);
  EXPECT_EQ(r.steps[0].beta_n, -0.25);
  EXPECT_NEAR(r.rhs.extrapolated, 1.0, 1e-5);
}

TEST(Improper, InvalidSchedules) {
  const ImproperProblem p = improper("x", "t", 0, 1);
  EXPECT_THROW(verify_improper(improper("x", "t", 1, 0)), DomainError);
  ImproperSchedule s;
  s.max_steps = 2;
  EXPECT_THROW(verify_improper(p, s), DomainError);
  s = {};
  s.offset = 0.6;
  EXPECT_THROW(verify_improper(p, s), DomainError);
  s = {};
  s.tol = 0;
  EXPECT_THROW(verify_improper(p, s), DomainError);
}

TEST(Aitken, AcceleratesGeometricTail) {
  // x_n = 1 + 2^-n is exactly geometric.
  EXPECT_DOUBLE_EQ(detail::aitken(1.5, 1.25, 1.125), 1.0);
  EXPECT_EQ(detail::aitken(1.0, 1.0, 1.0), 1.0);
}
