#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "saddle/experiment.h"

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual solvers for PL-concave min-max problems"};
  app.require_subcommand(1);

  std::string spec_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int gap_budget = 0;
  std::vector<int> horizons = {100, 200, 400, 800};
  std::vector<std::string> solvers = {"pdm", "agda", "gda"};

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("spec", spec_path, "Experiment spec (JSON) or a summary.json")
        ->required();
    cmd->add_option("--seed", seed, "Master seed, overrides solver.seed");
    cmd->add_option("--out-dir", out_dir, "Output directory");
    cmd->add_option("--gap-budget", gap_budget,
                    "Evaluate the gap function with this iteration budget")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "Run over several horizons");
  add_common(sweep);
  sweep->add_option("--horizons", horizons, "Comma-separated horizons")
      ->delimiter(',');
  CLI::App* compare =
      app.add_subcommand("compare", "Run several solvers at a fixed budget");
  add_common(compare);
  compare->add_option("--solvers", solvers, "Comma-separated solver names")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  saddle::CliOverrides overrides;
  const auto parsed = [&](const char* name) {
    return app.get_subcommands().front()->count(name) > 0;
  };
  if (parsed("--seed")) overrides.seed = seed;
  if (parsed("--out-dir")) overrides.out_dir = out_dir;
  if (parsed("--gap-budget")) overrides.gap_budget = gap_budget;

  if (run->parsed()) return saddle::CmdRun(spec_path, overrides);
  if (sweep->parsed()) return saddle::CmdSweep(spec_path, horizons, overrides);
  return saddle::CmdCompare(spec_path, solvers, overrides);
}
