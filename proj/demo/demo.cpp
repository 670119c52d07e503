// Library tour: parse, integrate, build an approximant, verify a substitution.

#include <cstdio>
#include <numbers>

#include "quadratura/quadratura.hpp"

using namespace quadratura;

int main() {
  const Expr f = parse("x/(x^4+1)");
  const DarbouxEstimate e = integrate(f, {0, 1}, 1e-8);
  std::printf("integral of %s on [0,1]: [%.12f, %.12f] with %zu cells\n", to_string(f).c_str(),
              e.lower, e.upper, e.cells);
  std::printf("derivative: %s\n", to_string(differentiate(f, "x")).c_str());

  const PiecewiseLinear g = build_approximant(parse("x^2"), {0, 1}, 6);
  std::printf("approximant n=6: %zu knots, integral %.6f (f has 1/3)\n", g.size(), integrate_pl(g));

  const SubstitutionReport r = verify({f, parse("sqrt(t)"), 0, 1, std::nullopt}, 1e-6);
  std::printf("substitution x = sqrt(t): lhs %.10f rhs %.10f pi/8 %.10f -> %s (%s)\n",
              r.lhs.value(), r.rhs.value(), std::numbers::pi / 8, to_string(r.verdict),
              r.theorem.c_str());
  for (const auto& h : r.hypotheses.items)
    std::printf("  %-28s %s\n", h.name.c_str(), to_string(h.verdict));
  return 0;
}
