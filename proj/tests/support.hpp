#pragma once

// Shared fixtures: the [0,1] test battery with exact-bound hints, closed-form
// oracles, and a seeded random source.

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "quadratura/quadratura.hpp"

namespace qt {

using namespace quadratura;

inline double staircase(double x) { return x < 0.5 ? 0.25 : 0.75; }

using Scalar = std::function<double(double)>;
using Hinted = MonotoneHinted<Scalar>;

struct BatteryMember {
  std::string name;
  Hinted f;
  double integral;        // over [0, 1]
  Scalar F;               // antiderivative with F(0) = 0
  double sup;             // M on [0, 1]
  std::optional<double> lipschitz;
  bool continuous;
};

inline std::vector<BatteryMember> battery() {
  std::vector<BatteryMember> out;
  out.push_back({"one", Hinted([](double) { return 1.0; }, {}), 1.0, [](double x) { return x; },
                 1.0, 0.0, true});
  out.push_back({"x", Hinted([](double x) { return x; }, {}), 0.5,
                 [](double x) { return 0.5 * x * x; }, 1.0, 1.0, true});
  out.push_back({"x^2", Hinted([](double x) { return x * x; }, {0.0}), 1.0 / 3.0,
                 [](double x) { return x * x * x / 3.0; }, 1.0, 2.0, true});
  out.push_back({"|x-1/2|", Hinted([](double x) { return std::fabs(x - 0.5); }, {0.5}), 0.25,
                 [](double x) {
                   return x <= 0.5 ? 0.5 * x - 0.5 * x * x : 0.125 + 0.5 * (x - 0.5) * (x - 0.5);
                 },
                 0.5, 1.0, true});
  out.push_back({"staircase", Hinted(staircase, {}), 0.5,
                 [](double x) { return x <= 0.5 ? 0.25 * x : 0.125 + 0.75 * (x - 0.5); }, 0.75,
                 std::nullopt, false});
  return out;
}

/// Antiderivative of the polynomial with coefficients c (c[k] multiplies x^k).
inline double poly_antiderivative(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k] / static_cast<double>(k + 1);
  return acc * x;
}

inline std::string poly_text(const std::vector<double>& c, const std::string& var) {
  std::string s;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k) s += " + ";
    s += "(" + detail::format_number(c[k]) + ")";
    if (k) s += "*" + var + "^" + std::to_string(k);
  }
  return s;
}

struct DerivativeCase {
  std::string text;
  std::string var;
  double lo;
  double hi;  // sampling range avoiding the declared singular set
};

/// f and phi of each gallery entry. Singular sets: t = 0 for t*sin(1/t) and
/// sqrt(t), theta = +-pi/2 for tan(theta).
inline std::vector<DerivativeCase> gallery_derivative_cases() {
  return {{"x^3", "x", 0.0, 2.0 / std::numbers::pi},
          {"t*sin(1/t)", "t", 0.05, 2.0 / std::numbers::pi},
          {"x/(x^4+1)", "x", 0.0, 1.0},
          {"sqrt(t)", "t", 0.01, 1.0},
          {"1/(x^2+1)", "x", -50.0, 50.0},
          {"tan(theta)", "theta", -1.4, 1.4}};
}

/// Largest |d - cd| / (1 + |d|) over `points` uniform draws, cd the central
/// difference with step h.
inline double max_derivative_deviation(const DerivativeCase& c, std::uint64_t seed,
                                       int points = 100, double h = 1e-6) {
  const Expr e = parse(c.text, c.var);
  const Expr d = differentiate(e, c.var);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(c.lo, c.hi);
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = u(rng);
    const double dv = d(x);
    const double cd = (e(x + h) - e(x - h)) / (2.0 * h);
    worst = std::max(worst, std::fabs(dv - cd) / (1.0 + std::fabs(dv)));
  }
  return worst;
}

inline bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b) ||
         (std::isnan(a) && std::isnan(b));
}

}  // namespace qt
