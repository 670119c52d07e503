#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support.hpp"

using namespace quadratura;

TEST(Interval, Basics) {
  const Interval iv(1, 3);
  EXPECT_EQ(iv.length(), 2.0);
  EXPECT_FALSE(iv.degenerate());
  EXPECT_TRUE(Interval(2, 2).degenerate());
  EXPECT_THROW(Interval(1, 0), DomainError);
  EXPECT_THROW(Interval(0, std::numeric_limits<double>::infinity()), DomainError);
}

TEST(UniformPartition, Examples) {
  const Partition p = uniform_partition({0, 1}, 4);
  EXPECT_EQ(p.points(), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(p.norm(), 0.25);
  const Partition q = uniform_partition({0, 1}, 1);
  EXPECT_EQ(q.points(), (std::vector<double>{0, 1}));
  EXPECT_THROW(uniform_partition({2, 2}, 3), DomainError);
  EXPECT_THROW(uniform_partition({0, 1}, 0), DomainError);
}

TEST(Partition, RejectsBadPoints) {
  EXPECT_THROW(Partition({0.0}), DomainError);
  EXPECT_THROW(Partition({0.0, 0.0}), DomainError);
  EXPECT_THROW(Partition({0.0, 2.0, 1.0}), DomainError);
}

TEST(Partition, RefinementHalvesNorm) {
  const Partition p = uniform_partition({-1, 3}, 5);
  const Partition r = p.refined();
  EXPECT_EQ(r.cells(), 10u);
  EXPECT_TRUE(r.refines(p));
  EXPECT_FALSE(p.refines(r));
  EXPECT_DOUBLE_EQ(r.norm(), p.norm() / 2);
}

TEST(Epsilon, Examples) {
  EXPECT_DOUBLE_EQ(epsilon_n({0, 1}, 3), 1.0 / 24);
  EXPECT_DOUBLE_EQ(epsilon_n({0, 2}, 3), 1.0 / 12);
  EXPECT_THROW(epsilon_n({0, 1}, 2), DomainError);
}

TEST(LemmaGrid, LevelThreeGeometry) {
  const LemmaGrid g({0, 1}, 3);
  EXPECT_EQ(g.blocks(), 8u);
  EXPECT_EQ(g.sub_intervals().size(), 32u);
  // Interior blocks: epsilon, two middles of 1/48, epsilon.
  for (std::size_t k = 1; k + 1 < g.blocks(); ++k) {
    EXPECT_NEAR(g.sub_interval(k, 0).length(), 1.0 / 24, 1e-15);
    EXPECT_NEAR(g.sub_interval(k, 1).length(), 1.0 / 48, 1e-15);
    EXPECT_NEAR(g.sub_interval(k, 2).length(), 1.0 / 48, 1e-15);
    EXPECT_NEAR(g.sub_interval(k, 3).length(), 1.0 / 24, 1e-15);
  }
  // First block: three equal leading pieces, then epsilon.
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(g.sub_interval(0, j).length(), 1.0 / 36, 1e-15);
  EXPECT_NEAR(g.sub_interval(0, 3).length(), 1.0 / 24, 1e-15);
  // Last block mirrors it.
  EXPECT_NEAR(g.sub_interval(7, 0).length(), 1.0 / 24, 1e-15);
  for (int j = 1; j < 4; ++j) EXPECT_NEAR(g.sub_interval(7, j).length(), 1.0 / 36, 1e-15);

  CompensatedSum total;
  for (const Interval& s : g.sub_intervals()) total.add(s.length());
  EXPECT_NEAR(total.value(), 1.0, 1e-15);
}

TEST(LemmaGrid, LevelFourInteriorRamp) {
  const LemmaGrid g({0, 1}, 4);
  for (std::size_t k = 1; k + 1 < g.blocks(); ++k)
    EXPECT_NEAR(g.sub_interval(k, 0).length(), 1.0 / 64, 1e-16);
}

TEST(LemmaGrid, LevelLimits) {
  EXPECT_THROW(LemmaGrid({0, 1}, 2), DomainError);
  EXPECT_THROW(LemmaGrid({0, 1}, 25), ResourceError);
  EXPECT_NO_THROW(LemmaGrid({0, 1}, 24));
  EXPECT_THROW(LemmaGrid({1, 1}, 3), DomainError);
}

TEST(Property, LemmaGridInvariants) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> end(-10, 10);
  for (int trial = 0; trial < 20; ++trial) {
    double a = end(rng), b = end(rng);
    if (a > b) std::swap(a, b);
    const Interval iv(a, b);
    for (int n = 3; n <= 12; ++n) {
      const LemmaGrid g(iv, n);
      const double len = iv.length() / std::ldexp(1.0, n);
      const double tol = 8 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(a) + std::fabs(b));
      double prev = a;
      for (std::size_t k = 0; k < g.blocks(); ++k) {
        const auto e = g.edges(k);
        ASSERT_EQ(e[0], g.block_start(k));
        ASSERT_EQ(e[4], g.block_start(k + 1));  // consecutive blocks share one point
        ASSERT_EQ(e[0], prev);
        ASSERT_NEAR(e[4] - e[0], len, tol);
        for (int j = 0; j < 4; ++j) ASSERT_LT(e[j], e[j + 1]) << "n=" << n << " k=" << k;
        prev = e[4];
      }
      ASSERT_EQ(prev, b);
      const double eps = g.epsilon();
      const double scaled = eps * std::ldexp(1.0, n);
      const double expect = iv.length() / n;
      ASSERT_LE(std::fabs(scaled - expect), 2 * std::numeric_limits<double>::epsilon() * expect);
    }
  }
}

TEST(LemmaGrid, BlockPartition) {
  const LemmaGrid g({0, 2}, 5);
  const Partition p = g.block_partition();
  EXPECT_EQ(p.cells(), 32u);
  EXPECT_DOUBLE_EQ(p.norm(), 2.0 / 32);
  EXPECT_EQ(p.span().a, 0.0);
  EXPECT_EQ(p.span().b, 2.0);
}
