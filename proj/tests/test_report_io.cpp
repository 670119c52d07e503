#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "quadratura/report_io.hpp"
#include "support.hpp"

using namespace quadratura;
using nlohmann::json;

namespace {

void expect_same(const DarbouxEstimate& a, const DarbouxEstimate& b) {
  EXPECT_TRUE(qt::same_bits(a.lower, b.lower));
  EXPECT_TRUE(qt::same_bits(a.upper, b.upper));
  EXPECT_TRUE(qt::same_bits(a.norm, b.norm));
  EXPECT_EQ(a.cells, b.cells);
}

void expect_same(const HypothesisReport& a, const HypothesisReport& b) {
  ASSERT_EQ(a.items.size(), b.items.size());
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    EXPECT_EQ(a.items[i].name, b.items[i].name);
    EXPECT_EQ(a.items[i].verdict, b.items[i].verdict);
    EXPECT_EQ(a.items[i].witness.note, b.items[i].witness.note);
    ASSERT_EQ(a.items[i].witness.samples.size(), b.items[i].witness.samples.size());
    for (std::size_t k = 0; k < a.items[i].witness.samples.size(); ++k) {
      EXPECT_TRUE(qt::same_bits(a.items[i].witness.samples[k].at, b.items[i].witness.samples[k].at));
      const double va = a.items[i].witness.samples[k].value;
      const double vb = b.items[i].witness.samples[k].value;
      EXPECT_TRUE(std::isfinite(va) ? qt::same_bits(va, vb) : std::isnan(vb));
    }
  }
}

// Serialize, reparse from text, deserialize.
template <class T>
T round_trip(const T& v) {
  return json::parse(json(v).dump()).template get<T>();
}

}  // namespace

TEST(Json, EstimateRoundTripIsBitExact) {
  const DarbouxEstimate e = integrate(parse("x/(x^4+1)"), {0, 1}, 1e-7);
  expect_same(e, round_trip(e));
}

TEST(Json, NonFiniteBecomesNull) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const DarbouxEstimate e{-std::numeric_limits<double>::infinity(), nan, 0.5, 4};
  const json j = e;
  EXPECT_TRUE(j.at("lower").is_null());
  EXPECT_TRUE(j.at("upper").is_null());
  const DarbouxEstimate back = round_trip(e);
  EXPECT_TRUE(std::isnan(back.lower));
  EXPECT_TRUE(std::isnan(back.upper));
  EXPECT_EQ(back.norm, 0.5);
}

TEST(Json, SubstitutionReportRoundTrip) {
  const SubstitutionProblem p{parse("x^3"), parse("t*sin(1/t)"), 0, 2 / std::numbers::pi, std::nullopt};
  const SubstitutionReport r = verify(p, 5e-4);
  const SubstitutionReport back = round_trip(r);
  expect_same(r.lhs.estimate, back.lhs.estimate);
  expect_same(r.rhs.estimate, back.rhs.estimate);
  EXPECT_EQ(r.lhs.closed, back.lhs.closed);
  EXPECT_EQ(r.rhs.error, back.rhs.error);
  EXPECT_TRUE(qt::same_bits(r.phi_alpha, back.phi_alpha));
  EXPECT_TRUE(qt::same_bits(r.phi_beta, back.phi_beta));
  EXPECT_TRUE(qt::same_bits(r.abs_diff, back.abs_diff));
  EXPECT_EQ(r.tol, back.tol);
  EXPECT_EQ(r.verdict, back.verdict);
  EXPECT_EQ(r.theorem, back.theorem);
  EXPECT_EQ(r.phi_prime_source, back.phi_prime_source);
  EXPECT_EQ(r.notes, back.notes);
  expect_same(r.hypotheses, back.hypotheses);
}

TEST(Json, SubstitutionReportFields) {
  const SubstitutionProblem p{parse("x^2"), parse("t"), 0, 1, std::nullopt};
  const json j = verify(p, 1e-6);
  for (const char* key : {"lhs", "rhs", "abs_diff", "tol", "hypotheses", "verdict", "theorem", "phi_prime"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("verdict"), "verified");
  EXPECT_EQ(j.at("hypotheses").at(0).at("name"), "phi_continuous");
  EXPECT_EQ(j.at("hypotheses").back().at("verdict"), "undecidable-numerically");
}

TEST(Json, InconclusiveReportWithNaNs) {
  const SubstitutionProblem p{parse("x"), parse("log(-1-t^2)"), 0, 1, std::nullopt};
  const SubstitutionReport r = verify(p, 1e-6);
  const json j = r;
  EXPECT_TRUE(j.at("abs_diff").is_null());
  const SubstitutionReport back = round_trip(r);
  EXPECT_EQ(back.verdict, Verdict::inconclusive);
  EXPECT_TRUE(std::isnan(back.abs_diff));
  EXPECT_FALSE(back.lhs.error.empty());
}

TEST(Json, ImproperReportKeepsInfiniteLimits) {
  ImproperSchedule s;
  s.max_steps = 5;
  VerifyOptions opts;
  opts.check_hypotheses = false;
  const ImproperProblem p{parse("1/(x^2+1)"), parse("tan(theta)"), -std::numbers::pi / 2,
                          std::numbers::pi / 2, std::nullopt, std::nullopt, std::nullopt};
  const ImproperReport r = verify_improper(p, s, opts);
  const json j = r;
  EXPECT_EQ(j.at("a"), "-inf");
  EXPECT_EQ(j.at("b"), "inf");
  const ImproperReport back = round_trip(r);
  EXPECT_EQ(back.a, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(back.b, std::numeric_limits<double>::infinity());
  ASSERT_EQ(back.steps.size(), r.steps.size());
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    EXPECT_EQ(back.steps[i].n, r.steps[i].n);
    EXPECT_TRUE(qt::same_bits(back.steps[i].x_hi, r.steps[i].x_hi));
    expect_same(back.steps[i].lhs, r.steps[i].lhs);
    expect_same(back.steps[i].rhs, r.steps[i].rhs);
  }
  EXPECT_EQ(back.lhs.converged, r.lhs.converged);
  EXPECT_TRUE(qt::same_bits(back.rhs.last, r.rhs.last));
  EXPECT_EQ(back.verdict, r.verdict);
  EXPECT_EQ(back.notes, r.notes);
}

TEST(Json, ZeroExtensionReportFields) {
  const SubstitutionProblem p{parse("x/(x^4+1)"), parse("sqrt(t)"), 0, 1, std::nullopt};
  const json j = corollary1_verify(p, 1e-6);
  for (const char* key : {"f_over_J", "g_over_J", "f_substituted", "g_substituted", "max_spread"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("verdict"), "verified");
}

TEST(Json, UnknownVerdictsThrow) {
  json j = verify(SubstitutionProblem{parse("x"), parse("t"), 0, 1, std::nullopt}, 1e-6);
  j["verdict"] = "maybe";
  EXPECT_THROW(j.get<SubstitutionReport>(), DomainError);
  json h = Hypothesis{"phi_continuous", HypothesisVerdict::pass, {"ok", {}}};
  h["verdict"] = "undecidable";
  EXPECT_THROW(h.get<Hypothesis>(), DomainError);
}
