#pragma once

// JSON forms of the report types (nlohmann::json). NaN and infinities are
// written as null and read back as NaN.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadratura/changevar.hpp"
#include "quadratura/darboux.hpp"
#include "quadratura/errors.hpp"
#include "quadratura/improper.hpp"

namespace quadratura {

namespace detail {

inline nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline double number_from(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

inline Verdict verdict_from(const std::string& s) {
  if (s == "verified") return Verdict::verified;
  if (s == "mismatch") return Verdict::mismatch;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw DomainError("unknown verdict '" + s + "'");
}

inline HypothesisVerdict hypothesis_verdict_from(const std::string& s) {
  if (s == "pass") return HypothesisVerdict::pass;
  if (s == "fail") return HypothesisVerdict::fail;
  if (s == "undecidable-numerically") return HypothesisVerdict::undecidable;
  throw DomainError("unknown hypothesis verdict '" + s + "'");
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const DarbouxEstimate& e) {
  j = {{"lower", detail::number(e.lower)},
       {"upper", detail::number(e.upper)},
       {"norm", detail::number(e.norm)},
       {"cells", e.cells}};
}

inline void from_json(const nlohmann::json& j, DarbouxEstimate& e) {
  e.lower = detail::number_from(j.at("lower"));
  e.upper = detail::number_from(j.at("upper"));
  e.norm = j.contains("norm") ? detail::number_from(j.at("norm")) : 0.0;
  e.cells = j.value("cells", std::size_t{0});
}

inline void to_json(nlohmann::json& j, const SideResult& s) {
  to_json(j, s.estimate);
  j["value"] = detail::number(s.value());
  j["closed"] = s.closed;
  if (!s.error.empty()) j["error"] = s.error;
}

inline void from_json(const nlohmann::json& j, SideResult& s) {
  from_json(j, s.estimate);
  s.closed = j.value("closed", false);
  s.error = j.value("error", std::string{});
}

inline void to_json(nlohmann::json& j, const Hypothesis& h) {
  nlohmann::json samples = nlohmann::json::array();
  for (const Sample& s : h.witness.samples)
    samples.push_back({detail::number(s.at), detail::number(s.value)});
  j = {{"name", h.name},
       {"verdict", to_string(h.verdict)},
       {"witness", {{"note", h.witness.note}, {"samples", samples}}}};
}

inline void from_json(const nlohmann::json& j, Hypothesis& h) {
  h.name = j.at("name").get<std::string>();
  h.verdict = detail::hypothesis_verdict_from(j.at("verdict").get<std::string>());
  const auto& w = j.at("witness");
  h.witness.note = w.value("note", std::string{});
  h.witness.samples.clear();
  for (const auto& s : w.value("samples", nlohmann::json::array()))
    h.witness.samples.push_back({detail::number_from(s.at(0)), detail::number_from(s.at(1))});
}

inline void to_json(nlohmann::json& j, const HypothesisReport& r) { j = r.items; }

inline void from_json(const nlohmann::json& j, HypothesisReport& r) {
  r.items = j.get<std::vector<Hypothesis>>();
}

inline void to_json(nlohmann::json& j, const SubstitutionReport& r) {
  j = {{"lhs", r.lhs},
       {"rhs", r.rhs},
       {"phi_alpha", detail::number(r.phi_alpha)},
       {"phi_beta", detail::number(r.phi_beta)},
       {"abs_diff", detail::number(r.abs_diff)},
       {"tol", r.tol},
       {"hypotheses", r.hypotheses},
       {"verdict", to_string(r.verdict)},
       {"theorem", r.theorem},
       {"phi_prime", r.phi_prime_source},
       {"notes", r.notes}};
}

inline void from_json(const nlohmann::json& j, SubstitutionReport& r) {
  r.lhs = j.at("lhs").get<SideResult>();
  r.rhs = j.at("rhs").get<SideResult>();
  r.phi_alpha = j.contains("phi_alpha") ? detail::number_from(j.at("phi_alpha")) : 0.0;
  r.phi_beta = j.contains("phi_beta") ? detail::number_from(j.at("phi_beta")) : 0.0;
  r.abs_diff = detail::number_from(j.at("abs_diff"));
  r.tol = j.at("tol").get<double>();
  r.hypotheses = j.at("hypotheses").get<HypothesisReport>();
  r.verdict = detail::verdict_from(j.at("verdict").get<std::string>());
  r.theorem = j.value("theorem", std::string{});
  r.phi_prime_source = j.value("phi_prime", std::string{});
  r.notes = j.value("notes", std::vector<std::string>{});
}

inline void to_json(nlohmann::json& j, const ZeroExtensionReport& r) {
  j = {{"f_over_J", r.f_over_J},
       {"g_over_J", r.g_over_J},
       {"f_substituted", r.f_substituted},
       {"g_substituted", r.g_substituted},
       {"max_spread", detail::number(r.max_spread)},
       {"tol", r.tol},
       {"verdict", to_string(r.verdict)},
       {"notes", r.notes}};
}

inline void to_json(nlohmann::json& j, const ImproperStep& s) {
  j = {{"n", s.n},
       {"alpha_n", detail::number(s.alpha_n)},
       {"beta_n", detail::number(s.beta_n)},
       {"x_lo", detail::number(s.x_lo)},
       {"x_hi", detail::number(s.x_hi)},
       {"lhs", s.lhs},
       {"rhs", s.rhs}};
}

inline void from_json(const nlohmann::json& j, ImproperStep& s) {
  s.n = j.at("n").get<int>();
  s.alpha_n = detail::number_from(j.at("alpha_n"));
  s.beta_n = detail::number_from(j.at("beta_n"));
  s.x_lo = detail::number_from(j.at("x_lo"));
  s.x_hi = detail::number_from(j.at("x_hi"));
  s.lhs = j.at("lhs").get<DarbouxEstimate>();
  s.rhs = j.at("rhs").get<DarbouxEstimate>();
}

inline void to_json(nlohmann::json& j, const SideTrend& t) {
  j = {{"converged", t.converged},
       {"closed", t.closed},
       {"extrapolated", detail::number(t.extrapolated)},
       {"last", detail::number(t.last)},
       {"converged_at", t.converged_at}};
}

inline void from_json(const nlohmann::json& j, SideTrend& t) {
  t.converged = j.at("converged").get<bool>();
  t.closed = j.at("closed").get<bool>();
  t.extrapolated = detail::number_from(j.at("extrapolated"));
  t.last = detail::number_from(j.at("last"));
  t.converged_at = j.at("converged_at").get<int>();
}

inline void to_json(nlohmann::json& j, const ImproperReport& r) {
  // Infinite limits are spelled out; null would lose the sign.
  auto limit = [](double v) -> nlohmann::json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return detail::number(v);
  };
  j = {{"a", limit(r.a)},
       {"b", limit(r.b)},
       {"lhs", r.lhs},
       {"rhs", r.rhs},
       {"abs_diff", detail::number(r.abs_diff)},
       {"tol", r.tol},
       {"verdict", to_string(r.verdict)},
       {"hypotheses", r.hypotheses},
       {"phi_prime", r.phi_prime_source},
       {"steps", r.steps},
       {"notes", r.notes}};
}

inline void from_json(const nlohmann::json& j, ImproperReport& r) {
  auto limit = [](const nlohmann::json& v) {
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      return s == "-inf" ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
    }
    return detail::number_from(v);
  };
  r.a = limit(j.at("a"));
  r.b = limit(j.at("b"));
  r.lhs = j.at("lhs").get<SideTrend>();
  r.rhs = j.at("rhs").get<SideTrend>();
  r.abs_diff = detail::number_from(j.at("abs_diff"));
  r.tol = j.at("tol").get<double>();
  r.verdict = detail::verdict_from(j.at("verdict").get<std::string>());
  r.hypotheses = j.at("hypotheses").get<HypothesisReport>();
  r.phi_prime_source = j.value("phi_prime", std::string{});
  r.steps = j.at("steps").get<std::vector<ImproperStep>>();
  r.notes = j.value("notes", std::vector<std::string>{});
}

}  // namespace quadratura
