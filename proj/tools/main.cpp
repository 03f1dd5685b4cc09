#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "drsafe/error.hpp"

using drsafe::cli::CommandOptions;

namespace {

void common_flags(CLI::App* cmd, CommandOptions& opts, bool with_x, bool with_out) {
  cmd->add_option("--config", opts.config, "JSON run configuration")->required();
  if (with_x) cmd->add_option("--x", opts.x, "state as comma-separated values");
  if (with_out) {
    cmd->add_option("--out", opts.out, "output directory (overrides output.dir)");
    cmd->add_flag("--svg", opts.svg, "also write an SVG chart");
  }
  cmd->add_option("--seed", opts.seed, "overrides the config seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust safe control synthesis"};
  app.require_subcommand(1);
  CommandOptions opts;

  auto* solve = app.add_subcommand("solve", "closest safe control at a state");
  common_flags(solve, opts, true, false);
  auto* check = app.add_subcommand("check", "run one feasibility certificate");
  common_flags(check, opts, true, false);
  check->add_option("--which", opts.which, "necessary, sufficient1 or sufficient3")
      ->required()
      ->check(CLI::IsMember({"necessary", "sufficient1", "sufficient3"}));
  auto* simulate = app.add_subcommand("simulate", "closed-loop unicycle run");
  common_flags(simulate, opts, false, true);
  auto* bench = app.add_subcommand("bench", "timing sweep of certificates and solver");
  common_flags(bench, opts, true, true);
  auto* lipschitz = app.add_subcommand("lipschitz", "point Lipschitz estimate of the control law");
  common_flags(lipschitz, opts, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (solve->parsed()) return drsafe::cli::cmd_solve(opts, std::cout);
    if (check->parsed()) return drsafe::cli::cmd_check(opts, std::cout);
    if (simulate->parsed()) return drsafe::cli::cmd_simulate(opts, std::cout);
    if (bench->parsed()) return drsafe::cli::cmd_bench(opts, std::cout);
    if (lipschitz->parsed()) return drsafe::cli::cmd_lipschitz(opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}
