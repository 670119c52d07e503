#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace cli = quadratura::cli;

namespace {

void add_common(CLI::App* sub, cli::Common& c, bool csv = true) {
  sub->add_option("--tol", c.tol, "Bracket-width / agreement tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--samples", c.samples, "Samples per cell")->check(CLI::Range(2, 1 << 20));
  sub->add_option("--max-cells", c.max_cells, "Cell cap for refinement")->check(CLI::PositiveNumber);
  auto* json = sub->add_flag_callback("--json", [&c] { c.format = cli::Format::json; },
                                      "JSON output");
  if (csv) {
    auto* csvf = sub->add_flag_callback("--csv", [&c] { c.format = cli::Format::csv; },
                                        "CSV output");
    json->excludes(csvf);
  }
  sub->add_flag_callback("--text", [&c] { c.format = cli::Format::text; }, "Plain text output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Darboux-bracket integration and change-of-variable verification"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out", out_path, "Write the result to PATH instead of stdout");

  cli::IntegrateArgs ia;
  auto* integrate = app.add_subcommand("integrate", "Bracket the integral of f from a to b");
  integrate->add_option("--f", ia.f, "Integrand")->required();
  integrate->add_option("--a", ia.a, "Lower limit");
  integrate->add_option("--b", ia.b, "Upper limit");
  add_common(integrate, ia.common);

  cli::SubstituteArgs sa;
  auto* substitute = app.add_subcommand("substitute", "Check the substitution identity on [alpha, beta]");
  substitute->add_option("--f", sa.f, "Outer integrand f(x)")->required();
  substitute->add_option("--phi", sa.phi, "Substitution map phi(t)")->required();
  substitute->add_option("--alpha", sa.alpha, "Lower t limit");
  substitute->add_option("--beta", sa.beta, "Upper t limit");
  substitute->add_option("--phi-prime", sa.phi_prime, "Derivative of phi (default: symbolic)");
  substitute->add_option("--hypothesis-grid", sa.hypothesis_grid, "Grid size for hypothesis checks");
  substitute->add_flag("!--no-hypotheses", sa.hypotheses, "Skip hypothesis checks");
  add_common(substitute, sa.common);

  cli::ImproperArgs ma;
  auto* improper = app.add_subcommand("improper", "Substitution with open or infinite endpoints");
  improper->add_option("--f", ma.f, "Outer integrand f(x)")->required();
  improper->add_option("--phi", ma.phi, "Substitution map phi(t)")->required();
  improper->add_option("--alpha", ma.alpha, "Lower t limit (may be -inf)")->required();
  improper->add_option("--beta", ma.beta, "Upper t limit (may be inf)")->required();
  improper->add_option("--phi-prime", ma.phi_prime, "Derivative of phi");
  improper->add_option("--lim-a", ma.a, "Limit of phi at alpha+");
  improper->add_option("--lim-b", ma.b, "Limit of phi at beta-");
  improper->add_option("--offset", ma.offset, "Approach offset for finite endpoints");
  improper->add_option("--t-cutoff", ma.t_cutoff, "Initial cutoff R for infinite t endpoints")
      ->check(CLI::PositiveNumber);
  improper->add_option("--x-cutoff", ma.x_cutoff, "Initial cutoff R for infinite x limits")
      ->check(CLI::PositiveNumber);
  improper->add_option("--max-steps", ma.max_steps, "Schedule length")->check(CLI::Range(3, 60));
  improper->add_option("--integration-tol", ma.integration_tol, "Bracket width per piece")
      ->check(CLI::PositiveNumber);
  improper->add_flag("!--no-hypotheses", ma.hypotheses, "Skip hypothesis checks");
  add_common(improper, ma.common);

  cli::ApproxArgs aa;
  auto* approx = app.add_subcommand("approx", "Piecewise-linear below-approximant f_n as CSV");
  approx->add_option("--f", aa.f, "Nonnegative function")->required();
  approx->add_option("--a", aa.a, "Left end");
  approx->add_option("--b", aa.b, "Right end");
  approx->add_option("-n,--n", aa.n, "Level n");
  approx->add_flag("--l1", aa.l1, "Also report the L1 distance to f");
  add_common(approx, aa.common);

  cli::DiffArgs da;
  auto* diff = app.add_subcommand("diff", "Print the symbolic derivative");
  diff->add_option("--f", da.f, "Expression")->required();
  diff->add_option("--var", da.variable, "Variable (default: the one in f, else x)");
  add_common(diff, da.common, false);

  cli::GalleryArgs ga;
  auto* gallery = app.add_subcommand("gallery", "Run the three worked examples");
  gallery->add_option("--only", ga.only, "Run only these entries (E1, E2, E3)");
  add_common(gallery, ga.common);

  // --out is accepted after the subcommand as well.
  for (auto* sub : {integrate, substitute, improper, approx, diff, gallery})
    sub->add_option("--out", out_path, "Write the result to PATH instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  std::unique_ptr<std::ofstream> file;
  if (!out_path.empty()) {
    file = std::make_unique<std::ofstream>(out_path);
    if (!*file) {
      std::cerr << "quadratura: cannot open " << out_path << " for writing\n";
      return cli::kExitUsage;
    }
  }
  std::ostream& out = file ? *file : std::cout;

  try {
    if (*integrate) return cli::run_integrate(ia, out, std::cerr);
    if (*substitute) return cli::run_substitute(sa, out, std::cerr);
    if (*improper) return cli::run_improper(ma, out, std::cerr);
    if (*approx) return cli::run_approx(aa, out, std::cerr);
    if (*diff) return cli::run_diff(da, out, std::cerr);
    if (*gallery) return cli::run_gallery(ga, out, std::cerr);
  } catch (const quadratura::ParseError& e) {
    std::cerr << "quadratura: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const quadratura::DomainError& e) {
    std::cerr << "quadratura: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const quadratura::Error& e) {
    std::cerr << "quadratura: " << e.what() << '\n';
    return cli::kExitNumerical;
  }
  return cli::kExitUsage;
}
