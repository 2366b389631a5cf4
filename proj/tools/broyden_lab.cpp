#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "broyden_lab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"broyden_lab: experiments for the convex Broyden class of quasi-Newton updates"};
  app.require_subcommand(1);

  std::string config_path;
  int jobs = 1;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run an experiment or a suite from a JSON config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--jobs", jobs, "Experiments run concurrently");
  run->add_option("--out", out_dir, "Output directory");

  int n_max = 8;
  int trials = 1000;
  std::uint64_t seed = 0;
  auto* verify = app.add_subcommand("verify", "Randomized identity and inequality checks");
  verify->add_option("--n-max", n_max, "Largest dimension");
  verify->add_option("--trials", trials, "Random instances per check");
  verify->add_option("--seed", seed, "RNG seed");

  std::string grid_path;
  auto* sweep = app.add_subcommand("sweep", "Quadratic sweep over (n, L/mu, method)");
  sweep->add_option("grid", grid_path, "Grid spec (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : broyden_lab::kExitConfig;
  }

  try {
    if (run->parsed()) {
      broyden_lab::RunOptions opt;
      opt.jobs = jobs;
      if (!out_dir.empty()) opt.out_dir = out_dir;
      return broyden_lab::cmd_run(config_path, opt, std::cout, std::cerr);
    }
    if (verify->parsed()) {
      return broyden_lab::cmd_verify(n_max, trials, seed, std::cout, std::cerr);
    }
    return broyden_lab::cmd_sweep(grid_path, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return broyden_lab::kExitViolation;
  }
}
