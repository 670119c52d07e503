#pragma once

// The three worked substitution examples with their closed-form values.
// Endpoints and expected values are kept as expression text and evaluated at
// run time.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "quadratura/changevar.hpp"
#include "quadratura/errors.hpp"
#include "quadratura/improper.hpp"
#include "quadratura/parser.hpp"

namespace quadratura {

struct GalleryEntry {
  std::string_view id;
  std::string_view f;
  std::string_view phi;
  std::string_view alpha;
  std::string_view beta;
  std::string_view expected;
  double tol;
  bool improper;  // open endpoints: run the truncation schedule
};

inline constexpr std::array<GalleryEntry, 3> kGallery{{
    {"E1", "x^3", "t*sin(1/t)", "0", "2/pi", "4/pi^4", 5e-4, false},
    {"E2", "x/(x^4+1)", "sqrt(t)", "0", "1", "pi/8", 1e-6, false},
    {"E3", "1/(x^2+1)", "tan(theta)", "-pi/2", "pi/2", "pi", 1e-6, true},
}};

inline const GalleryEntry& gallery_entry(std::string_view id) {
  for (const auto& e : kGallery)
    if (e.id == id) return e;
  throw DomainError("no gallery entry '" + std::string(id) + "' (known: E1, E2, E3)");
}

/// Value of a variable-free expression such as "2/pi" or "-inf".
inline double constant_value(std::string_view text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  const Expr e = parse(text);
  if (!e.variable_name().empty())
    throw ParseError(ParseError::Kind::unknown_identifier, 0,
                     "'" + e.variable_name() + "' in a constant expression");
  return e(0.0);
}

struct GalleryResult {
  const GalleryEntry* entry = nullptr;
  double tol = 0.0;
  double expected = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  Verdict verdict = Verdict::inconclusive;
  bool pass = false;  // verified and both values within tol of expected
  std::variant<SubstitutionReport, ImproperReport> report;
};

struct GalleryOptions {
  std::optional<double> tol;  // overrides each entry's tolerance
  VerifyOptions verify{};
};

inline SubstitutionProblem gallery_problem(const GalleryEntry& e) {
  return {parse(e.f), parse(e.phi), constant_value(e.alpha), constant_value(e.beta), std::nullopt};
}

inline ImproperProblem gallery_improper_problem(const GalleryEntry& e) {
  return {parse(e.f), parse(e.phi), constant_value(e.alpha), constant_value(e.beta),
          std::nullopt, std::nullopt, std::nullopt};
}

inline GalleryResult run_gallery_entry(const GalleryEntry& e, const GalleryOptions& opts = {}) {
  GalleryResult r;
  r.entry = &e;
  r.tol = opts.tol.value_or(e.tol);
  r.expected = constant_value(e.expected);
  if (e.improper) {
    ImproperSchedule s;
    s.tol = r.tol;
    ImproperReport rep = verify_improper(gallery_improper_problem(e), s, opts.verify);
    r.lhs = rep.lhs.extrapolated;
    r.rhs = rep.rhs.extrapolated;
    r.verdict = rep.verdict;
    r.report = std::move(rep);
  } else {
    SubstitutionReport rep = verify(gallery_problem(e), r.tol, opts.verify);
    r.lhs = rep.lhs.value();
    r.rhs = rep.rhs.value();
    r.verdict = rep.verdict;
    r.report = std::move(rep);
  }
  r.pass = r.verdict == Verdict::verified && std::fabs(r.lhs - r.expected) <= r.tol &&
           std::fabs(r.rhs - r.expected) <= r.tol;
  return r;
}

}  // namespace quadratura
