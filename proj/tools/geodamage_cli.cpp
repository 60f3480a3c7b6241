#include <iostream>

#include "CLI11.hpp"
#include "geodamage/commands.hpp"

int main(int argc, char** argv) {
  using namespace geodamage;
  CLI::App app{"Gradient damage and plasticity simulator"};
  app.require_subcommand(1);

  CommandOptions opt;
  std::uint64_t seed = 0;
  double from = 0.0, to = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Configuration file");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_flag("--quiet", opt.quiet, "Suppress the summary");
    sub->add_option("--seed", seed, "Seed for randomized tests");
  };
  auto* run = app.add_subcommand("run", "Run one evolution");
  common(run);
  auto* check = app.add_subcommand("check", "Verify a stored trajectory");
  common(check);
  check->add_option("dir", opt.dir, "Trajectory directory");
  auto* sweep = app.add_subcommand("sweep-eps", "Viscous runs for every epsilon of the sweep list");
  common(sweep);
  auto* rescale = app.add_subcommand("rescale", "Arc-length rescaling of a stored trajectory");
  common(rescale);
  rescale->add_option("dir", opt.dir, "Trajectory directory");
  auto* oracle = app.add_subcommand("oracle", "Compare one homogeneous step with grid search");
  common(oracle);
  oracle->add_option("--from", from, "Start time");
  oracle->add_option("--to", to, "Target time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->get_name() == "oracle") {
      if (sub->count("--from")) opt.from_time = from;
      if (sub->count("--to")) opt.to_time = to;
    }
  }

  if (run->parsed()) return cmd_run(opt, std::cout, std::cerr);
  if (check->parsed()) return cmd_check(opt, std::cout, std::cerr);
  if (sweep->parsed()) return cmd_sweep_eps(opt, std::cout, std::cerr);
  if (rescale->parsed()) return cmd_rescale(opt, std::cout, std::cerr);
  return cmd_oracle(opt, std::cout, std::cerr);
}
