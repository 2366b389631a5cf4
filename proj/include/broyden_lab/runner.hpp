#ifndef BROYDEN_LAB_RUNNER_HPP
#define BROYDEN_LAB_RUNNER_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "broyden_lab/problems.hpp"

namespace broyden_lab {

/// Exit codes of the command-line surface.
inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfig = 2;

struct ExperimentResult {
  std::string name;
  bool passed = false;
  bool diverged = false;
  std::optional<int> first_violation;
  double min_slack = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
  std::string output_dir;
  std::string message;
};

struct SuiteResult {
  std::vector<ExperimentResult> experiments;
  bool passed() const;
};

struct RunOptions {
  int jobs = 1;
  std::optional<std::string> out_dir;
};

/// Runs one experiment or a suite from a JSON config file and writes
/// trace.csv, envelopes.csv and summary.json per experiment. Returns 0 when
/// every experiment passes, 1 on a violation or divergence, 2 on a malformed
/// config (nothing is written in that case).
int cmd_run(const std::string& config_path, const RunOptions& opt, std::ostream& out,
            std::ostream& err);

/// Same, returning the structured result. Throws ConfigError on a malformed config.
SuiteResult run_suite(const std::string& config_text, const RunOptions& opt);

/// Randomized identity and inequality suites; prints the worst slack per check.
int cmd_verify(int n_max, int trials, std::uint64_t seed, std::ostream& out, std::ostream& err);

/// Quadratic sweep over (n, L/mu, method) from a JSON grid
/// {"n": [...], "L_over_mu": [...], "methods": [...], "seed"?, "max_iter"?, "output"?}.
/// Writes one CSV row per cell to out (and to the "output" file when given).
int cmd_sweep(const std::string& grid_path, std::ostream& out, std::ostream& err);

/// Instance from its JSON text (same schema as the "instance" entry of a config).
ProblemInstance instance_from_json_text(const std::string& text, std::uint64_t default_seed = 0);

/// Shortest round-trip decimal representation used in all CSV output.
std::string format_number(double v);

}  // namespace broyden_lab

#endif  // BROYDEN_LAB_RUNNER_HPP
