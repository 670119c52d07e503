#pragma once

// Command implementations behind the quadratura tool. Each command writes its
// result to `out`, diagnostics to `err`, and returns the process exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "quadratura/quadratura.hpp"
#include "quadratura/report_io.hpp"

namespace quadratura::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

enum class Format { text, json, csv };

struct Common {
  std::optional<double> tol;
  std::size_t samples = SamplingConfig{}.samples_per_cell;
  std::size_t max_cells = IntegrateOptions{}.max_cells;
  std::optional<Format> format;

  SamplingConfig sampling() const {
    SamplingConfig c;
    c.samples_per_cell = samples;
    return c;
  }
  IntegrateOptions integration() const {
    IntegrateOptions o;
    o.max_cells = max_cells;
    o.min_cells = std::min(o.min_cells, max_cells);
    return o;
  }
  Format format_or(Format f) const { return format.value_or(f); }
};

inline void write_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

inline std::string num(double v) {
  std::string s;
  append_number(s, v);
  return s;
}

// integrate ------------------------------------------------------------------

struct IntegrateArgs {
  Common common;
  std::string f;
  std::string a = "0";
  std::string b = "1";
};

inline int run_integrate(const IntegrateArgs& args, std::ostream& out, std::ostream& err) {
  const Expr f = parse(args.f);
  const double a = constant_value(args.a);
  const double b = constant_value(args.b);
  const double tol = args.common.tol.value_or(kDefaultTolerance);
  DarbouxEstimate est;
  bool converged = true;
  std::string error;
  try {
    est = integrate_oriented(f, a, b, tol, args.common.sampling(), args.common.integration());
  } catch (const NonConvergence& e) {
    est = e.last();
    converged = false;
    error = e.what();
  }
  const Format fmt = args.common.format_or(Format::json);
  if (fmt == Format::csv) {
    out << "lower,upper,midpoint,width,norm,cells,converged\n"
        << num(est.lower) << ',' << num(est.upper) << ',' << num(est.midpoint()) << ','
        << num(est.width()) << ',' << num(est.norm) << ',' << est.cells << ','
        << (converged ? "true" : "false") << '\n';
  } else if (fmt == Format::text) {
    out << "integral of " << to_string(f) << " from " << num(a) << " to " << num(b) << '\n'
        << "  lower    " << num(est.lower) << '\n'
        << "  upper    " << num(est.upper) << '\n'
        << "  midpoint " << num(est.midpoint()) << '\n'
        << "  cells    " << est.cells << (converged ? "" : "  (not converged)") << '\n';
  } else {
    nlohmann::json j = {{"command", "integrate"},
                        {"f", to_string(f)},
                        {"a", detail::number(a)},
                        {"b", detail::number(b)},
                        {"tol", tol},
                        {"converged", converged},
                        {"midpoint", detail::number(est.midpoint())},
                        {"estimate", est}};
    if (!error.empty()) j["error"] = error;
    write_json(out, j);
  }
  if (!converged) err << "quadratura: " << error << '\n';
  return converged ? kExitOk : kExitNumerical;
}

// substitute -----------------------------------------------------------------

struct SubstituteArgs {
  Common common;
  std::string f;
  std::string phi;
  std::string alpha = "0";
  std::string beta = "1";
  std::optional<std::string> phi_prime;
  bool hypotheses = true;
  std::size_t hypothesis_grid = 1000;
};

inline VerifyOptions verify_options(const Common& c) {
  VerifyOptions o;
  o.sampling = c.sampling();
  o.integration = c.integration();
  return o;
}

inline void write_hypotheses_csv(std::ostream& out, const HypothesisReport& h) {
  out << "hypothesis,verdict,note\n";
  for (const auto& item : h.items) {
    std::string note = item.witness.note;
    for (char& ch : note)
      if (ch == '"') ch = '\'';
    out << item.name << ',' << to_string(item.verdict) << ",\"" << note << "\"\n";
  }
}

inline void write_hypotheses_text(std::ostream& out, const HypothesisReport& h) {
  for (const auto& item : h.items) {
    out << "  " << item.name;
    for (std::size_t i = item.name.size(); i < 30; ++i) out << ' ';
    out << to_string(item.verdict);
    if (!item.witness.note.empty()) out << "  " << item.witness.note;
    out << '\n';
  }
}

inline int run_substitute(const SubstituteArgs& args, std::ostream& out, std::ostream& err) {
  SubstitutionProblem p{parse(args.f), parse(args.phi), constant_value(args.alpha),
                        constant_value(args.beta), std::nullopt};
  if (args.phi_prime) p.phi_prime = parse(*args.phi_prime);
  VerifyOptions opts = verify_options(args.common);
  opts.check_hypotheses = args.hypotheses;
  opts.hypothesis_grid = args.hypothesis_grid;
  const double tol = args.common.tol.value_or(kDefaultTolerance);
  const SubstitutionReport r = verify(p, tol, opts);

  const Format fmt = args.common.format_or(Format::json);
  if (fmt == Format::csv) {
    write_hypotheses_csv(out, r.hypotheses);
  } else if (fmt == Format::text) {
    out << "lhs  " << num(r.lhs.value()) << "  [" << num(r.lhs.estimate.lower) << ", "
        << num(r.lhs.estimate.upper) << "]\n"
        << "rhs  " << num(r.rhs.value()) << "  [" << num(r.rhs.estimate.lower) << ", "
        << num(r.rhs.estimate.upper) << "]\n"
        << "|lhs - rhs| " << num(r.abs_diff) << "  tol " << num(r.tol) << '\n'
        << "verdict " << to_string(r.verdict) << "  (" << r.theorem << ")\n";
    write_hypotheses_text(out, r.hypotheses);
  } else {
    nlohmann::json j = r;
    j["command"] = "substitute";
    j["problem"] = {{"f", to_string(p.f)},
                    {"phi", to_string(p.phi)},
                    {"alpha", detail::number(p.alpha)},
                    {"beta", detail::number(p.beta)}};
    if (p.phi_prime) j["problem"]["phi_prime"] = to_string(*p.phi_prime);
    write_json(out, j);
  }
  for (const auto& n : r.notes) err << "quadratura: " << n << '\n';
  return r.verdict == Verdict::verified ? kExitOk : kExitNumerical;
}

// improper -------------------------------------------------------------------

struct ImproperArgs {
  Common common;
  std::string f;
  std::string phi;
  std::string alpha;
  std::string beta;
  std::optional<std::string> phi_prime;
  std::optional<std::string> a;
  std::optional<std::string> b;
  std::optional<std::string> offset;
  double t_cutoff = 1.0;
  double x_cutoff = 1.0;
  int max_steps = ImproperSchedule{}.max_steps;
  double integration_tol = ImproperSchedule{}.integration_tol;
  bool hypotheses = true;
};

inline void write_steps_csv(std::ostream& out, const std::vector<ImproperStep>& steps) {
  out << "n,alpha_n,beta_n,x_lo,x_hi,lhs_lower,lhs_upper,rhs_lower,rhs_upper\n";
  for (const auto& s : steps)
    out << s.n << ',' << num(s.alpha_n) << ',' << num(s.beta_n) << ',' << num(s.x_lo) << ','
        << num(s.x_hi) << ',' << num(s.lhs.lower) << ',' << num(s.lhs.upper) << ','
        << num(s.rhs.lower) << ',' << num(s.rhs.upper) << '\n';
}

inline int run_improper(const ImproperArgs& args, std::ostream& out, std::ostream& err) {
  ImproperProblem p{parse(args.f), parse(args.phi), constant_value(args.alpha),
                    constant_value(args.beta), std::nullopt, std::nullopt, std::nullopt};
  if (args.phi_prime) p.phi_prime = parse(*args.phi_prime);
  if (args.a) p.a = constant_value(*args.a);
  if (args.b) p.b = constant_value(*args.b);
  ImproperSchedule s;
  if (args.offset) s.offset = constant_value(*args.offset);
  s.t_cutoff = args.t_cutoff;
  s.x_cutoff = args.x_cutoff;
  s.max_steps = args.max_steps;
  s.integration_tol = args.integration_tol;
  s.tol = args.common.tol.value_or(kDefaultTolerance);
  VerifyOptions opts = verify_options(args.common);
  opts.check_hypotheses = args.hypotheses;
  const ImproperReport r = verify_improper(p, s, opts);

  const Format fmt = args.common.format_or(Format::json);
  if (fmt == Format::csv) {
    write_steps_csv(out, r.steps);
  } else if (fmt == Format::text) {
    out << "lhs  " << num(r.lhs.extrapolated) << (r.lhs.converged ? "" : "  (no convergence)")
        << '\n'
        << "rhs  " << num(r.rhs.extrapolated) << (r.rhs.converged ? "" : "  (no convergence)")
        << '\n'
        << "|lhs - rhs| " << num(r.abs_diff) << "  tol " << num(r.tol) << '\n'
        << "verdict " << to_string(r.verdict) << "  after " << r.steps.size() << " steps\n";
    write_hypotheses_text(out, r.hypotheses);
  } else {
    nlohmann::json j = r;
    j["command"] = "improper";
    j["problem"] = {{"f", to_string(p.f)}, {"phi", to_string(p.phi)},
                    {"alpha", args.alpha}, {"beta", args.beta}};
    write_json(out, j);
  }
  for (const auto& n : r.notes) err << "quadratura: " << n << '\n';
  return r.verdict == Verdict::verified ? kExitOk : kExitNumerical;
}

// approx ---------------------------------------------------------------------

struct ApproxArgs {
  Common common;
  std::string f;
  std::string a = "0";
  std::string b = "1";
  int n = 3;
  bool l1 = false;
};

struct ApproxSummary {
  int n = 0;
  std::size_t knots = 0;
  double integral = 0.0;     // integral of f_n
  double lower_sum = 0.0;    // s(f, P_n): block infima times block length
  double sup = 0.0;          // M, largest sampled value of f
  double bound = 0.0;        // M (b - a) / n
  std::optional<double> l1;  // integral of |f - f_n|
  bool holds() const {
    const double gap = lower_sum - integral;
    return gap >= -1e-12 * std::max(1.0, std::fabs(lower_sum)) && gap <= bound * (1 + 1e-12);
  }
};

inline int run_approx(const ApproxArgs& args, std::ostream& out, std::ostream& err) {
  const Expr f = parse(args.f);
  const Interval iv(constant_value(args.a), constant_value(args.b));
  const SamplingConfig cfg = args.common.sampling();
  if (args.n < 1) throw DomainError("approximant level n must be at least 1");

  ApproxSummary sum;
  sum.n = args.n;
  std::optional<PiecewiseLinear> g;
  if (args.n < kMinLemmaLevel) {
    g = zero_function(iv);
    const Bounds whole = bounds_on(f, iv, cfg);
    sum.sup = whole.sup;
  } else {
    const LemmaGrid grid(iv, args.n);
    const std::vector<Bounds> bb = block_bounds(f, grid, cfg);
    std::vector<double> m(bb.size());
    CompensatedSum s;
    sum.sup = bb.front().sup;
    for (std::size_t k = 0; k < bb.size(); ++k) {
      m[k] = bb[k].inf;
      if (m[k] < 0.0)
        throw DomainError("f must be nonnegative; infimum " + num(m[k]) + " on block [" +
                          num(grid.block_start(k)) + ", " + num(grid.block_start(k + 1)) + "]");
      s.add(m[k] * grid.block_length());
      sum.sup = std::max(sum.sup, bb[k].sup);
    }
    sum.lower_sum = s.value();
    g = approximant_from_levels(grid, m);
  }
  sum.knots = g->size();
  sum.integral = integrate_pl(*g);
  sum.bound = level_change_bound(sum.sup, iv, args.n);
  if (args.l1)
    sum.l1 = l1_distance(f, *g, iv, args.common.tol.value_or(1e-4), cfg,
                         args.common.integration());

  if (args.common.format_or(Format::csv) == Format::json) {
    nlohmann::json j = {{"command", "approx"},
                        {"f", to_string(f)},
                        {"a", iv.a},
                        {"b", iv.b},
                        {"n", sum.n},
                        {"knots", g->knots()},
                        {"values", g->values()},
                        {"integral", sum.integral},
                        {"lower_sum", sum.lower_sum},
                        {"sup", detail::number(sum.sup)},
                        {"bound", detail::number(sum.bound)},
                        {"bound_holds", sum.holds()}};
    if (sum.l1) j["l1"] = *sum.l1;
    write_json(out, j);
  } else {
    write_csv(out, *g);
    err << "n=" << sum.n << " knots=" << sum.knots << " integral=" << num(sum.integral)
        << " lower_sum=" << num(sum.lower_sum) << " sup=" << num(sum.sup)
        << " bound=" << num(sum.bound) << " bound_holds=" << (sum.holds() ? "yes" : "no");
    if (sum.l1) err << " l1=" << num(*sum.l1);
    err << '\n';
  }
  return kExitOk;
}

// diff -----------------------------------------------------------------------

struct DiffArgs {
  Common common;
  std::string f;
  std::string variable;
};

inline int run_diff(const DiffArgs& args, std::ostream& out, std::ostream&) {
  const Expr f = parse(args.f, args.variable);
  std::string var = args.variable;
  if (var.empty()) var = f.variable_name().empty() ? "x" : f.variable_name();
  const Expr d = differentiate(f, var);
  if (args.common.format_or(Format::text) == Format::json) {
    write_json(out, {{"command", "diff"},
                     {"f", to_string(f)},
                     {"variable", var},
                     {"derivative", to_string(d)}});
  } else {
    out << to_string(d) << '\n';
  }
  return kExitOk;
}

// gallery --------------------------------------------------------------------

struct GalleryArgs {
  Common common;
  std::vector<std::string> only;
};

struct GalleryRow {
  GalleryResult result;
  double seconds = 0.0;
};

inline std::vector<GalleryRow> run_gallery_rows(const GalleryArgs& args) {
  std::vector<const GalleryEntry*> entries;
  if (args.only.empty()) {
    for (const auto& e : kGallery) entries.push_back(&e);
  } else {
    for (const auto& id : args.only) entries.push_back(&gallery_entry(id));
  }
  GalleryOptions opts;
  opts.tol = args.common.tol;
  opts.verify = verify_options(args.common);
  std::vector<GalleryRow> rows;
  for (const GalleryEntry* e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    GalleryRow row{run_gallery_entry(*e, opts), 0.0};
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json gallery_json(const GalleryRow& row) {
  const GalleryResult& r = row.result;
  nlohmann::json j = {{"id", r.entry->id},
                      {"f", r.entry->f},
                      {"phi", r.entry->phi},
                      {"alpha", r.entry->alpha},
                      {"beta", r.entry->beta},
                      {"expected_expr", r.entry->expected},
                      {"expected", r.expected},
                      {"tol", r.tol},
                      {"lhs", detail::number(r.lhs)},
                      {"rhs", detail::number(r.rhs)},
                      {"verdict", to_string(r.verdict)},
                      {"pass", r.pass},
                      {"seconds", row.seconds}};
  std::visit([&](const auto& rep) { j["report"] = rep; }, r.report);
  return j;
}

inline int run_gallery(const GalleryArgs& args, std::ostream& out, std::ostream&) {
  const std::vector<GalleryRow> rows = run_gallery_rows(args);
  bool all = true;
  for (const auto& row : rows) all = all && row.result.pass;

  const Format fmt = args.common.format_or(Format::text);
  if (fmt == Format::json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& row : rows) j.push_back(gallery_json(row));
    write_json(out, j);
  } else if (fmt == Format::csv) {
    out << "id,expected,lhs,rhs,tol,verdict,pass,seconds\n";
    for (const auto& row : rows) {
      const GalleryResult& r = row.result;
      out << r.entry->id << ',' << num(r.expected) << ',' << num(r.lhs) << ',' << num(r.rhs)
          << ',' << num(r.tol) << ',' << to_string(r.verdict) << ','
          << (r.pass ? "pass" : "fail") << ',' << num(row.seconds) << '\n';
    }
  } else {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-10s %-20s %-20s %-20s %-8s %-13s %-5s %s\n", "id",
                  "expected", "value", "lhs", "rhs", "tol", "verdict", "pass", "time");
    out << line;
    for (const auto& row : rows) {
      const GalleryResult& r = row.result;
      std::snprintf(line, sizeof line,
                    "%-4s %-10s %-20.15g %-20.15g %-20.15g %-8.1e %-13s %-5s %.3fs\n",
                    std::string(r.entry->id).c_str(), std::string(r.entry->expected).c_str(),
                    r.expected, r.lhs, r.rhs, r.tol, to_string(r.verdict),
                    r.pass ? "yes" : "no", row.seconds);
      out << line;
    }
    std::size_t passed = 0;
    for (const auto& row : rows) passed += row.result.pass ? 1 : 0;
    out << passed << '/' << rows.size() << " pass\n";
  }
  return all ? kExitOk : kExitNumerical;
}

}  // namespace quadratura::cli
