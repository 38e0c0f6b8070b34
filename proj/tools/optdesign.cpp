#include <CLI11.hpp>
#include <iostream>

#include "optdesign/cli.hpp"

int main(int argc, char** argv) {
  using optdesign::cli::RunConfig;
  CLI::App app{"Approximate optimal design: solve, certify, analyze geometry and audit admissibility"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_model = [&](CLI::App* sub) { sub->add_option("--model", cfg.model_path, "model file (JSON)")->required(); };
  auto add_design = [&](CLI::App* sub) { sub->add_option("--design", cfg.design_path, "design file (JSON)")->required(); };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", cfg.out_dir, "directory for report files"); };
  auto add_criterion = [&](CLI::App* sub) {
    sub->add_option("--criterion", cfg.criterion, "D, A, E, T or p:<real>")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "normality tolerance")->capture_default_str();
  };

  auto* solve = app.add_subcommand("solve", "compute an optimal design on the candidate grid");
  add_model(solve);
  add_criterion(solve);
  add_out(solve);
  solve->add_option("--max-iters", cfg.solver.max_outer_iters, "outer iterations")->capture_default_str();
  solve->add_option("--seed", cfg.solver.seed, "seed of the initial design")->capture_default_str();
  solve->add_option("--init-design", cfg.init_design_path, "starting design (JSON)");
  solve->add_option("--round", cfg.round_n, "also round the design to this many runs");

  auto* certify = app.add_subcommand("certify", "check a design against the equivalence theorem");
  add_model(certify);
  add_design(certify);
  add_criterion(certify);
  add_out(certify);

  auto* geometry = app.add_subcommand("geometry", "supporting hyperplanes of a certified design");
  add_model(geometry);
  add_design(geometry);
  add_criterion(geometry);
  add_out(geometry);

  auto* garza = app.add_subcommand("garza", "norm injectivity and saturation bound");
  add_model(garza);
  add_out(garza);

  auto* audit = app.add_subcommand("audit", "search for a Loewner-dominating design");
  add_model(audit);
  add_design(audit);
  add_out(audit);
  audit->add_option("--slice-map", cfg.slice_map, "coord:<axis> or linear:<a1>,<a2> (conditional audit)");
  audit->add_option("--budget", cfg.budget, "ascent steps per penalty stage")->capture_default_str();
  audit->add_flag("--product", cfg.product, "audit both marginal designs of a product model");

  auto* decompose = app.add_subcommand("decompose", "marginal and conditional designs of a slice map");
  add_model(decompose);
  add_design(decompose);
  add_out(decompose);
  decompose->add_option("--slice-map", cfg.slice_map, "coord:<axis> or linear:<a1>,<a2>")->required();

  auto* examples = app.add_subcommand("examples", "run the bundled example suite against golden values");
  examples->add_option("--filter", cfg.filter, "case name pattern")->capture_default_str();
  examples->add_option("--suite", cfg.suite_dir, "suite directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : optdesign::cli::kValidation;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return optdesign::cli::run(cfg, std::cout, std::cerr);
}
