#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cli.hpp"

using namespace fracvamp;
using namespace fracvamp::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_main(std::vector<std::string> args) {
  args.insert(args.begin(), "fracvamp");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("grid parsing") {
  const auto range = parse_grid("0.2:1.0:0.1");
  REQUIRE(range.size() == 9);
  CHECK(range.front() == doctest::Approx(0.2));
  CHECK(range.back() == doctest::Approx(1.0));

  const auto list = parse_grid("0.6,1.0,2.5");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 1.0);

  CHECK_THROWS_AS(parse_grid("1.0:0.2:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0.2:1.0:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("abc"), ConfigError);
  CHECK_THROWS_AS(parse_grid(""), ConfigError);
}

TEST_CASE("reference setup flags equal the defaults") {
  const CliConfig defaults = parse_and_validate({"sweep"});
  const CliConfig spelled = parse_and_validate(
      {"sweep", "--N", "258", "--M", "129", "--s", "12", "--snr-db", "17",
       "--v", "0.2", "--iters", "20"});
  CHECK(defaults.ensemble.N == spelled.ensemble.N);
  CHECK(defaults.ensemble.M == spelled.ensemble.M);
  CHECK(defaults.ensemble.s == spelled.ensemble.s);
  CHECK(defaults.ensemble.snr_db == spelled.ensemble.snr_db);
  CHECK(defaults.ensemble.v == spelled.ensemble.v);
  CHECK(defaults.solver.max_iterations == spelled.solver.max_iterations);
  CHECK(defaults.ensemble.trials == 200);
  CHECK(defaults.d_grid.size() == 9);
  CHECK(defaults.e_grid.size() == 30);
  // initialization variance defaults to the prior variance s/N
  CHECK(defaults.solver.prior_variance ==
        doctest::Approx(12.0 / 258.0).epsilon(1e-12));
}

TEST_CASE("run subcommand configuration") {
  const CliConfig cfg = parse_and_validate(
      {"run", "--d", "0.7", "--e", "1.5", "--case", "onle", "--mode",
       "average", "--seed", "42"});
  CHECK(cfg.command == CliConfig::Command::Run);
  CHECK(cfg.solver.d == 0.7);
  CHECK(cfg.solver.e == 1.5);
  CHECK(cfg.solver.damping == DampingCase::Onle);
  CHECK(cfg.solver.variance_mode == VarianceMode::Average);
  CHECK(cfg.run_seed_set);
  CHECK(cfg.run_seed == 42);

  const CliConfig baseline = parse_and_validate({"run", "--d", "1", "--e", "1"});
  CHECK(baseline.solver.d == 1.0);
  CHECK(baseline.solver.e == 1.0);
  CHECK(baseline.solver.damping == DampingCase::None);
  CHECK(!baseline.run_seed_set);
}

TEST_CASE("every invalid flag is named at once") {
  try {
    parse_and_validate({"run", "--d", "0", "--e", "-1", "--v", "2"});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("--d") != std::string::npos);
    CHECK(msg.find("--e") != std::string::npos);
    CHECK(msg.find("--v") != std::string::npos);
  }
}

TEST_CASE("unknown flags and missing subcommands are config errors") {
  CHECK_THROWS_AS(parse_and_validate({"run", "--bogus", "3"}), ConfigError);
  CHECK_THROWS_AS(parse_and_validate({}), ConfigError);
  CHECK_THROWS_AS(parse_and_validate({"sweep", "--cases", "upside-down"}),
                  ConfigError);
  CHECK_THROWS_AS(parse_and_validate({"sweep", "--d-grid", "0:2:0.5"}),
                  ConfigError);
  CHECK_THROWS(parse_and_validate({"--help"}));
}

TEST_CASE("help is reported, not treated as an error") {
  CHECK_THROWS_AS(parse_and_validate({"run", "--help"}), HelpRequested);
  try {
    parse_and_validate({"run", "--help"});
  } catch (const HelpRequested& h) {
    CHECK(h.text.find("--d") != std::string::npos);
    CHECK(h.text.find("default") != std::string::npos);
  }
}

TEST_CASE("environment variable overrides the output directory") {
  ::setenv("FRACVAMP_OUT_DIR", "/tmp/fracvamp_env_dir", 1);
  const CliConfig cfg = parse_and_validate({"sweep"});
  CHECK(cfg.out_dir == fs::path("/tmp/fracvamp_env_dir"));
  const CliConfig flagged =
      parse_and_validate({"sweep", "--out-dir", "elsewhere"});
  CHECK(flagged.out_dir == fs::path("elsewhere"));
  ::unsetenv("FRACVAMP_OUT_DIR");
}

TEST_CASE("sweep execution writes deterministic csv artifacts") {
  const fs::path dir_a = fs::temp_directory_path() / "fracvamp_cli_a";
  const fs::path dir_b = fs::temp_directory_path() / "fracvamp_cli_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  const std::vector<std::string> common = {
      "sweep", "--N", "32", "--M", "16", "--s", "4", "--trials", "3",
      "--iters", "5", "--d-grid", "0.5,1.0", "--e-grid", "1.0,2.0",
      "--per-trial"};

  std::vector<std::string> args_a = common;
  args_a.insert(args_a.end(), {"--out-dir", dir_a.string(), "--threads", "2"});
  std::vector<std::string> args_b = common;
  args_b.insert(args_b.end(), {"--out-dir", dir_b.string(), "--threads", "1"});

  execute(parse_and_validate(args_a));
  execute(parse_and_validate(args_b));

  for (const char* name : {"summary.csv", "minima.csv", "trials.csv"}) {
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("unwritable output fails before any computation") {
  const std::vector<std::string> args = {
      "sweep", "--N", "32", "--M", "16", "--s", "4", "--trials", "1",
      "--iters", "2", "--d-grid", "1.0", "--e-grid", "1.0",
      "--out-dir", "/dev/null/nested"};
  CHECK_THROWS_AS(execute(parse_and_validate(args)), IoError);
}

TEST_CASE("exit code taxonomy") {
  CHECK(run_main({"--help"}) == 0);
  CHECK(run_main({"run", "--d", "0"}) == 2);
  CHECK(run_main({"nonsense"}) == 2);
  CHECK(run_main({"sweep", "--N", "8", "--M", "4", "--s", "2", "--trials", "1",
                  "--iters", "2", "--d-grid", "1.0", "--e-grid", "1.0",
                  "--out-dir", "/dev/null/nested"}) == 4);
  // divergent configuration: overflow flags the trial, run reports numeric
  CHECK(run_main({"run", "--N", "32", "--M", "8", "--s", "4", "--v", "0.05",
                  "--snr-db", "60", "--iters", "600", "--e", "3", "--mode",
                  "average", "--clip-policy", "cavities"}) == 3);
  const fs::path dir = fs::temp_directory_path() / "fracvamp_cli_run";
  fs::remove_all(dir);
  CHECK(run_main({"run", "--N", "32", "--M", "16", "--s", "4", "--iters", "5",
                  "--out-dir", dir.string(), "--out", "traj.csv"}) == 0);
  const std::string traj = slurp(dir / "traj.csv");
  CHECK(traj.rfind("iter,nmse", 0) == 0);
  fs::remove_all(dir);
}
