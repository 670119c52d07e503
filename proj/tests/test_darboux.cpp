#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "support.hpp"

using namespace quadratura;

namespace {

// Runs body with QUADRATURA_THREADS set to `threads`, restoring it afterwards.
template <class Body>
auto with_threads(const char* threads, Body body) {
  const char* old = std::getenv("QUADRATURA_THREADS");
  const std::string saved = old ? old : "";
  setenv("QUADRATURA_THREADS", threads, 1);
  auto r = body();
  if (old)
    setenv("QUADRATURA_THREADS", saved.c_str(), 1);
  else
    unsetenv("QUADRATURA_THREADS");
  return r;
}

}  // namespace

TEST(Bounds, Examples) {
  EXPECT_EQ(infimum_on(parse("5"), {0, 1}), 5.0);
  EXPECT_EQ(supremum_on(parse("5"), {-3, 7}), 5.0);
  EXPECT_EQ(infimum_on(parse("x"), {0.25, 0.5}), 0.25);
  EXPECT_EQ(supremum_on(parse("x"), {0.25, 0.5}), 0.5);
}

TEST(Bounds, OscillatingCellAgainstDenseOracle) {
  const Expr f = parse("sin(1/t)");
  const Interval cell(0.01, 0.02);
  const double sampled = infimum_on(f, cell);
  double oracle = 1.0;
  for (int i = 0; i <= 1000000; ++i) oracle = std::min(oracle, f(0.01 + 0.01 * i / 1e6));
  EXPECT_GE(sampled, -1.0);
  EXPECT_GE(sampled, oracle);
  // One sample gap is 0.01/63 and |f'| <= 1/t^2 <= 1e4 on the cell.
  EXPECT_LE(sampled - oracle, 1e4 * 0.01 / 63);
  // The sampled value is the minimum over the 64-sample grid.
  double grid = 1.0;
  for (int j = 0; j < 64; ++j) grid = std::min(grid, f(j == 63 ? 0.02 : 0.01 + j * (0.01 / 63)));
  EXPECT_EQ(sampled, grid);
}

TEST(Bounds, SampleCountIsConfigurable) {
  SamplingConfig cfg;
  cfg.samples_per_cell = 1;
  EXPECT_THROW(infimum_on(parse("x"), {0, 1}, cfg), DomainError);
  cfg.samples_per_cell = 2;
  EXPECT_EQ(infimum_on(parse("x^2"), {-1, 1}, cfg), 1.0);  // only the endpoints
  cfg.samples_per_cell = 3;
  EXPECT_EQ(infimum_on(parse("x^2"), {-1, 1}, cfg), 0.0);
}

TEST(Sums, Examples) {
  const Partition p = uniform_partition({2, 5}, 7);
  EXPECT_DOUBLE_EQ(lower_sum(parse("4"), p), 12.0);
  EXPECT_DOUBLE_EQ(upper_sum(parse("4"), p), 12.0);
  EXPECT_DOUBLE_EQ(lower_sum(parse("x"), uniform_partition({0, 1}, 4)), 0.375);
  for (std::size_t n : {1u, 2u, 5u, 10u, 33u})
    EXPECT_NEAR(lower_sum(parse("x"), uniform_partition({0, 1}, n)), (static_cast<double>(n) - 1.0) / (2.0 * static_cast<double>(n)), 1e-15);
}

TEST(Sums, SecondExampleBracketsPiOverEight) {
  const DarbouxEstimate e = uniform_darboux(parse("x/(x^4+1)"), {0, 1}, std::size_t{1} << 16);
  EXPECT_LE(e.lower, std::numbers::pi / 8);
  EXPECT_GE(e.upper, std::numbers::pi / 8);
  EXPECT_EQ(e.cells, std::size_t{1} << 16);
  EXPECT_DOUBLE_EQ(e.norm, 1.0 / 65536);
}

TEST(Integrate, Examples) {
  const DarbouxEstimate a = integrate(parse("x"), {0, 1}, 1e-6);
  EXPECT_TRUE(a.contains(0.5));
  EXPECT_LE(a.width(), 1e-6);

  const DarbouxEstimate b = integrate(parse("x/(x^4+1)"), {0, 1}, 1e-7);
  EXPECT_TRUE(b.contains(std::numbers::pi / 8));
  EXPECT_LE(b.width(), 1e-7);

  const double c_exact = 4 / std::pow(std::numbers::pi, 4);
  const DarbouxEstimate c = integrate(parse("x^3"), {0, 2 / std::numbers::pi}, 1e-7);
  EXPECT_TRUE(c.contains(c_exact));
  EXPECT_LE(c.width(), 1e-7);
}

TEST(Integrate, DoublingStartsAtDefaultAndStaysPowerOfTwo) {
  const DarbouxEstimate e = integrate(parse("x^2"), {0, 1}, 1e-5);
  EXPECT_GE(e.cells, std::size_t{1} << 10);
  EXPECT_EQ(e.cells & (e.cells - 1), 0u);
  IntegrateOptions o;
  o.min_cells = 4;
  const DarbouxEstimate coarse = integrate(parse("3"), {0, 1}, 1e-5, {}, o);
  EXPECT_EQ(coarse.cells, 4u);
  EXPECT_EQ(coarse.lower, 3.0);
}

TEST(Integrate, Reversal) {
  const Expr f = parse("exp(x)*sin(x)");
  const DarbouxEstimate fwd = integrate_oriented(f, 0.0, 2.0, 1e-6);
  const DarbouxEstimate rev = integrate_oriented(f, 2.0, 0.0, 1e-6);
  EXPECT_EQ(rev.lower, -fwd.upper);
  EXPECT_EQ(rev.upper, -fwd.lower);
  EXPECT_EQ(rev.midpoint(), -fwd.midpoint());
}

TEST(Integrate, DegenerateAndInvalid) {
  const DarbouxEstimate z = integrate(parse("x"), {1, 1}, 1e-6);
  EXPECT_EQ(z.lower, 0.0);
  EXPECT_EQ(z.upper, 0.0);
  EXPECT_EQ(z.cells, 0u);
  EXPECT_THROW(integrate(parse("x"), {0, 1}, 0.0), DomainError);
  EXPECT_THROW(integrate(parse("x"), {0, 1}, -1.0), DomainError);
}

TEST(Integrate, NonConvergenceCarriesLastBracket) {
  IntegrateOptions o;
  o.max_cells = std::size_t{1} << 14;
  try {
    integrate(parse("sin(1/x)"), {0.001, 1}, 1e-9, {}, o);
    FAIL();
  } catch (const NonConvergence& e) {
    EXPECT_LT(e.last().lower, e.last().upper);
    EXPECT_GT(e.last().cells, 0u);
  }
  // Unbounded integrand: the bracket is infinite at the first level.
  EXPECT_THROW(integrate(parse("1/x"), {-1, 1}, 1e-3), NonConvergence);
}

TEST(UndefinedPolicy, IsolatedPointsAreSkipped) {
  // sin(x)/x is undefined only at 0.
  const Expr f = parse("sin(x)/x");
  const DarbouxEstimate e = integrate(f, {0, 1}, 1e-6);
  const double si1 = 0.94608307036718301494;  // Si(1)
  EXPECT_TRUE(e.contains(si1));
  SamplingConfig strict;
  strict.undefined_policy = UndefinedPolicy::fail;
  EXPECT_THROW(integrate(f, {0, 1}, 1e-6, strict), DomainError);
}

TEST(UndefinedPolicy, RunsAndWholeCellsAreErrors) {
  EXPECT_THROW(integrate(parse("sqrt(x)"), {-1, 1}, 1e-3), DomainError);
  EXPECT_THROW(integrate(parse("log(x)"), {-2, -1}, 1e-3), DomainError);
}

TEST(Property, SoundWithExactBounds) {
  for (const auto& m : qt::battery()) {
    for (int k = 0; k <= 14; ++k) {
      const std::size_t n = std::size_t{1} << k;
      const DarbouxEstimate e = uniform_darboux(m.f, {0, 1}, n);
      ASSERT_LE(e.lower, m.integral) << m.name << " n=" << n;
      ASSERT_GE(e.upper, m.integral) << m.name << " n=" << n;
    }
  }
}

TEST(Property, SoundOnSubintervalsWithExactBounds) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& m : qt::battery()) {
    for (int trial = 0; trial < 50; ++trial) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      if (a == b) continue;
      const double exact = m.F(b) - m.F(a);
      const Partition p = uniform_partition({a, b}, 1 + static_cast<std::size_t>(trial));
      const DarbouxEstimate e = darboux_sums(m.f, p);
      const double slack = 1e-15;
      ASSERT_LE(e.lower, exact + slack) << m.name;
      ASSERT_GE(e.upper, exact - slack) << m.name;
    }
  }
}

TEST(Property, RefinementOrderingWithExactBounds) {
  for (const auto& m : qt::battery()) {
    Partition p = uniform_partition({0, 1}, 3);
    DarbouxEstimate prev = darboux_sums(m.f, p);
    for (int level = 0; level < 10; ++level) {
      const Partition r = p.refined();
      ASSERT_TRUE(r.refines(p));
      const DarbouxEstimate next = darboux_sums(m.f, r);
      ASSERT_LE(prev.lower, next.lower) << m.name << " level " << level;
      ASSERT_LE(next.lower, next.upper) << m.name;
      ASSERT_LE(next.upper, prev.upper) << m.name << " level " << level;
      prev = next;
      p = r;
    }
  }
}

TEST(Property, RefinementOrderingSampledWithinSlack) {
  // Lipschitz constant of x/(x^4+1) on [0,1] is 1; one sample gap is norm/63.
  const Expr f = parse("x/(x^4+1)");
  Partition p = uniform_partition({0, 1}, 5);
  DarbouxEstimate prev = darboux_sums(f, p);
  for (int level = 0; level < 10; ++level) {
    const Partition r = p.refined();
    const DarbouxEstimate next = darboux_sums(f, r);
    const double slack = 2 * 1.0 * (p.norm() / 63);
    ASSERT_LE(prev.lower, next.lower + slack);
    ASSERT_LE(next.upper, prev.upper + slack);
    prev = next;
    p = r;
  }
}

TEST(Property, LipschitzGap) {
  for (const auto& m : qt::battery()) {
    if (!m.lipschitz) continue;
    for (std::size_t n : {1u, 3u, 10u, 64u, 1000u, 4096u}) {
      const DarbouxEstimate e = uniform_darboux(m.f, {0, 1}, n);
      ASSERT_LE(e.width(), *m.lipschitz * 1.0 * e.norm * (1 + 1e-12)) << m.name << " n=" << n;
    }
  }
}

TEST(Determinism, IndependentOfThreadCount) {
  const Expr f = parse("x/(x^4+1) + sin(7*x)");
  const auto one = with_threads("0", [&] { return integrate(f, {0, 3}, 1e-4); });
  const auto four = with_threads("4", [&] { return integrate(f, {0, 3}, 1e-4); });
  EXPECT_TRUE(qt::same_bits(one.lower, four.lower));
  EXPECT_TRUE(qt::same_bits(one.upper, four.upper));
  EXPECT_EQ(one.cells, four.cells);
}
