#include <CLI11.hpp>

#include "qaw/cli.hpp"

int main(int argc, char** argv) {
  qaw::cli::RunConfig cfg;
  try {
    cfg.prefix = qaw::cli::default_prefix();
  } catch (const qaw::Error& e) {
    qaw::cli::detail::error_json(std::cerr, e.kind(), e.what());
    return 2;
  }

  CLI::App app{"Weight sequence, weight matrix and witness toolkit"};
  app.add_option("command", cfg.command, "inspect | regularize | qa-check | relate | matrix-dominate | conjugate | "
                                         "assoc-matrix | witness | partial-sums | probe-scan")
      ->required();
  app.add_option("--input,-i", cfg.input_paths, "input JSON file (repeatable)");
  app.add_option("--prefix", cfg.prefix, "prefix length (default 2048, or QAW_PREFIX)");
  app.add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out,-o", cfg.output, "output directory");
  app.add_option("--seed", cfg.seed, "seed for randomized fixtures");
  app.add_option("--a0", cfg.a0, "radius parameter a in (0,1]");
  app.add_option("--d-schedule", cfg.d_schedule, "increasing factors d_1, d_2, ...")->delimiter(',');
  app.add_option("--levels", cfg.levels, "matrix levels")->delimiter(',');
  app.add_option("--model", cfg.model, "unit | perturbed:delta[:decay]");
  app.add_option("--alphas", cfg.alphas, "probe coefficients")->delimiter(',');
  app.add_option("--max-p", cfg.max_p, "witness length");
  app.add_option("--bound", cfg.bound, "probe bound");
  app.add_option("--k", cfg.k_list, "indices for partial-sums")->delimiter(',');
  app.add_option("--trials", cfg.trials, "random fixtures for probe-scan density checks");
  app.add_option("--budget-digits", cfg.budget_digits, "largest admissible index, in decimal digits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    qaw::cli::detail::error_json(std::cerr, "usage", e.what());
    return 1;
  }
  return qaw::cli::run(cfg);
}
