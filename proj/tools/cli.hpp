#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fracvamp/sweep.hpp"

namespace fracvamp::cli {

// Raised by --help/--version; the caller prints and exits 0.
struct HelpRequested {
  std::string text;
};

struct CliConfig {
  enum class Command { Run, Sweep, GenMatrixStats };
  Command command = Command::Sweep;

  EnsembleSpec ensemble;
  SolverConfig solver;
  bool prior_var_set = false;  // else derived as (s/N) * active_variance

  // sweep
  std::vector<double> d_grid;
  std::vector<double> e_grid;
  std::vector<DampingCase> cases;
  std::vector<VarianceMode> modes;
  bool per_trial = false;

  // run
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;

  // gen-matrix-stats
  int draws = 1000;

  int threads = 0;  // 0 = hardware concurrency
  std::filesystem::path out_dir = ".";
  std::string out;  // run: trajectory CSV; gen-matrix-stats: per-draw CSV

  SweepPlan to_plan() const;
};

// Grid syntax: "lo:hi:step" or a comma list "0.2,0.4,1.0".
std::vector<double> parse_grid(const std::string& text);

// Parses argv (without the program name) and validates every flag against
// the library invariants; throws ConfigError naming every invalid flag, or
// HelpRequested.
CliConfig parse_and_validate(const std::vector<std::string>& args);

// Runs the parsed command and writes its CSV artifacts. Throws on failure.
void execute(const CliConfig& cfg);

// Full front end: parse, execute, map errors to exit codes
// (0 ok, 2 config, 3 numeric, 4 I/O).
int cli_main(int argc, char** argv);

}  // namespace fracvamp::cli
