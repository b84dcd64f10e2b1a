#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fracvamp/csv.hpp"

namespace fracvamp::cli {

namespace fs = std::filesystem;

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
        !(step > 0.0)) {
      throw ConfigError("bad grid range '" + text + "' (expected lo:hi:step)");
    }
    const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
    if (count < 1 || lo > hi) {
      throw ConfigError("empty grid range '" + text + "'");
    }
    for (int i = 0; i < count; ++i) out.push_back(lo + i * step);
  } else {
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("bad grid value '" + item + "' in '" + text + "'");
      }
    }
  }
  if (out.empty()) throw ConfigError("empty grid '" + text + "'");
  return out;
}

SweepPlan CliConfig::to_plan() const {
  SweepPlan plan;
  plan.ensemble = ensemble;
  plan.d_grid = d_grid;
  plan.e_grid = e_grid;
  plan.cases = cases;
  plan.modes = modes;
  plan.base = solver;
  plan.threads = threads;
  return plan;
}

namespace {

struct RawArgs {
  std::string d_grid = "0.2:1.0:0.1";
  std::string e_grid = "0.6:3.5:0.1";
  std::string cases = "onle";
  std::string modes = "individual,average";
  std::string support_model = "exact";
  std::string clip_policy = "all";
  std::string dcase = "none";
  std::string mode = "individual";
  double prior_var = -1.0;
};

void append_errors(std::vector<std::string>& errs, const CliConfig& cfg,
                   const RawArgs& raw) {
  const auto check = [&](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };
  check(cfg.ensemble.N >= 1, "--N: must be >= 1");
  check(cfg.ensemble.M >= 1, "--M: must be >= 1");
  check(cfg.ensemble.M <= cfg.ensemble.N, "--M: must satisfy M <= N");
  check(cfg.ensemble.s >= 0 && cfg.ensemble.s <= cfg.ensemble.N,
        "--s: must lie in [0, N]");
  check(cfg.ensemble.v > 0.0 && cfg.ensemble.v <= 1.0,
        "--v: must lie in (0, 1]");
  check(cfg.ensemble.trials >= 1, "--trials: must be >= 1");
  check(cfg.ensemble.active_variance > 0.0, "--active-var: must be > 0");
  check(cfg.solver.max_iterations >= 1, "--iters: must be >= 1");
  check(cfg.solver.clip.nle.lo > 0.0 && cfg.solver.clip.nle.lo <= cfg.solver.clip.nle.hi,
        "--clip-nle-lo/--clip-nle-hi: need 0 < lo <= hi");
  check(cfg.solver.clip.other.lo > 0.0 &&
            cfg.solver.clip.other.lo <= cfg.solver.clip.other.hi,
        "--clip-other-lo/--clip-other-hi: need 0 < lo <= hi");
  check(cfg.threads >= 0, "--threads: must be >= 0");
  if (raw.prior_var > 0.0 || raw.prior_var == -1.0) {
    // fine; -1 means "derive from the prior"
  } else {
    errs.push_back("--prior-var: must be > 0");
  }

  if (cfg.command == CliConfig::Command::Run) {
    check(cfg.solver.d > 0.0 && cfg.solver.d <= 1.0,
          "--d: must lie in (0, 1]");
    check(cfg.solver.e > 0.0, "--e: must be > 0");
  }
  if (cfg.command == CliConfig::Command::GenMatrixStats) {
    check(cfg.draws >= 1, "--draws: must be >= 1");
  }
}

CliConfig assemble(CLI::App& app, const RawArgs& raw, CliConfig cfg) {
  std::vector<std::string> errs;

  if (cfg.command == CliConfig::Command::Sweep) {
    try {
      cfg.d_grid = parse_grid(raw.d_grid);
      for (double d : cfg.d_grid) {
        if (!(d > 0.0 && d <= 1.0)) {
          errs.push_back("--d-grid: values must lie in (0, 1]");
          break;
        }
      }
    } catch (const ConfigError& e) {
      errs.push_back(std::string("--d-grid: ") + e.what());
    }
    try {
      cfg.e_grid = parse_grid(raw.e_grid);
      for (double e : cfg.e_grid) {
        if (!(e > 0.0)) {
          errs.push_back("--e-grid: values must be > 0");
          break;
        }
      }
    } catch (const ConfigError& e) {
      errs.push_back(std::string("--e-grid: ") + e.what());
    }
    std::istringstream cs(raw.cases);
    std::string item;
    while (std::getline(cs, item, ',')) {
      try {
        cfg.cases.push_back(parse_damping_case(item));
      } catch (const ConfigError& e) {
        errs.push_back(std::string("--cases: ") + e.what());
      }
    }
    std::istringstream ms(raw.modes);
    while (std::getline(ms, item, ',')) {
      try {
        cfg.modes.push_back(parse_variance_mode(item));
      } catch (const ConfigError& e) {
        errs.push_back(std::string("--modes: ") + e.what());
      }
    }
  } else if (cfg.command == CliConfig::Command::Run) {
    try {
      cfg.solver.damping = parse_damping_case(raw.dcase);
    } catch (const ConfigError& e) {
      errs.push_back(std::string("--case: ") + e.what());
    }
    try {
      cfg.solver.variance_mode = parse_variance_mode(raw.mode);
    } catch (const ConfigError& e) {
      errs.push_back(std::string("--mode: ") + e.what());
    }
  }

  if (raw.support_model == "exact") {
    cfg.ensemble.support_model = SupportModel::ExactCount;
  } else if (raw.support_model == "bernoulli") {
    cfg.ensemble.support_model = SupportModel::IidBernoulli;
  } else {
    errs.push_back("--support-model: expected exact|bernoulli");
  }
  if (raw.clip_policy == "all") {
    cfg.solver.clip_policy = ClipPolicy::AllFormations;
  } else if (raw.clip_policy == "cavities") {
    cfg.solver.clip_policy = ClipPolicy::CavitiesOnly;
  } else {
    errs.push_back("--clip-policy: expected all|cavities");
  }
  if (raw.prior_var > 0.0) {
    cfg.solver.prior_variance = raw.prior_var;
    cfg.prior_var_set = true;
  } else {
    cfg.solver.prior_variance =
        std::max(static_cast<double>(cfg.ensemble.s), 1.0) / cfg.ensemble.N *
        cfg.ensemble.active_variance;
  }

  append_errors(errs, cfg, raw);
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    msg += "\nsee '" + app.get_name() + " --help'";
    throw ConfigError(msg);
  }
  return cfg;
}

}  // namespace

CliConfig parse_and_validate(const std::vector<std::string>& args) {
  CliConfig cfg;
  RawArgs raw;

  CLI::App app{"Stabilized VAMP/EC recovery for compressed sensing"};
  app.name("fracvamp");
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--N", cfg.ensemble.N, "signal dimension")
        ->capture_default_str();
    sub->add_option("--M", cfg.ensemble.M, "number of measurements")
        ->capture_default_str();
    sub->add_option("--s", cfg.ensemble.s, "sparsity (active components)")
        ->capture_default_str();
    sub->add_option("--snr-db", cfg.ensemble.snr_db,
                    "-10 log10 of the noise variance")
        ->capture_default_str();
    sub->add_option("--v", cfg.ensemble.v,
                    "power-profile factor in (0,1]; 1 disables the profile")
        ->capture_default_str();
    sub->add_option("--master-seed", cfg.ensemble.master_seed,
                    "seed all trial seeds derive from")
        ->capture_default_str();
    sub->add_option("--support-model", raw.support_model,
                    "signal support: exact|bernoulli")
        ->capture_default_str();
    sub->add_option("--active-var", cfg.ensemble.active_variance,
                    "variance of active signal components")
        ->capture_default_str();
    sub->add_option("--iters", cfg.solver.max_iterations,
                    "solver iterations per trial")
        ->capture_default_str();
    sub->add_option("--prior-var", raw.prior_var,
                    "initialization variance (default: s/N * active-var)");
    sub->add_option("--clip-nle-lo", cfg.solver.clip.nle.lo,
                    "lower clip bound, NLE precisions")
        ->capture_default_str();
    sub->add_option("--clip-nle-hi", cfg.solver.clip.nle.hi,
                    "upper clip bound, NLE precisions")
        ->capture_default_str();
    sub->add_option("--clip-other-lo", cfg.solver.clip.other.lo,
                    "lower clip bound, other precisions")
        ->capture_default_str();
    sub->add_option("--clip-other-hi", cfg.solver.clip.other.hi,
                    "upper clip bound, other precisions")
        ->capture_default_str();
    sub->add_option("--clip-policy", raw.clip_policy,
                    "clip placement: all|cavities")
        ->capture_default_str();
    sub->add_option("--threads", cfg.threads,
                    "worker threads (0 = hardware concurrency)")
        ->capture_default_str();
    sub->add_option("--out-dir", cfg.out_dir, "output directory for CSV files")
        ->envname("FRACVAMP_OUT_DIR")
        ->capture_default_str();
  };

  CLI::App* run = app.add_subcommand(
      "run", "solve one instance and report the NMSE trajectory");
  add_common(run);
  run->add_option("--d", cfg.solver.d, "damping factor in (0,1]; 1 = none")
      ->capture_default_str();
  run->add_option("--e", cfg.solver.e, "fractional parameter; 1 = standard")
      ->capture_default_str();
  run->add_option("--case", raw.dcase, "damping case: none|onle|olin|cnle")
      ->capture_default_str();
  run->add_option("--mode", raw.mode, "variance mode: individual|average")
      ->capture_default_str();
  auto* seed_opt =
      run->add_option("--seed", cfg.run_seed,
                      "explicit instance seed (default: derived from "
                      "--master-seed)");
  run->add_option("--out", cfg.out, "trajectory CSV path (optional)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Monte Carlo sweep over a (d, e) grid; writes summary CSVs");
  add_common(sweep);
  sweep->add_option("--trials", cfg.ensemble.trials, "trials per grid cell")
      ->capture_default_str();
  sweep->add_option("--d-grid", raw.d_grid, "damping grid, lo:hi:step or list")
      ->capture_default_str();
  sweep->add_option("--e-grid", raw.e_grid,
                    "fractional grid, lo:hi:step or list")
      ->capture_default_str();
  sweep->add_option("--cases", raw.cases, "damping cases, comma list")
      ->capture_default_str();
  sweep->add_option("--modes", raw.modes, "variance modes, comma list")
      ->capture_default_str();
  sweep->add_flag("--per-trial", cfg.per_trial,
                  "also write the per-trial CSV (trials.csv)");

  CLI::App* stats = app.add_subcommand(
      "gen-matrix-stats", "condition-number statistics of the matrix ensemble");
  add_common(stats);
  stats->add_option("--draws", cfg.draws, "number of matrices to draw")
      ->capture_default_str();
  stats->add_option("--out", cfg.out, "per-draw CSV path (optional)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp& e) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  if (run->parsed()) {
    cfg.command = CliConfig::Command::Run;
    cfg.run_seed_set = seed_opt->count() > 0;
  } else if (sweep->parsed()) {
    cfg.command = CliConfig::Command::Sweep;
  } else {
    cfg.command = CliConfig::Command::GenMatrixStats;
  }
  return assemble(app, raw, cfg);
}

namespace {

void execute_run(const CliConfig& cfg) {
  const std::uint64_t seed =
      cfg.run_seed_set ? cfg.run_seed
                       : derive_seed(cfg.ensemble.master_seed, 0, 0);
  const TrialRecord rec = run_trial_seeded(cfg.ensemble, cfg.solver, seed);

  std::printf("seed=%llu kappa=%.6f clip_events=%ld\n",
              static_cast<unsigned long long>(rec.seed), rec.kappa,
              rec.clip_events);
  if (!cfg.out.empty()) {
    std::string body = "iter,nmse\n";
    for (std::size_t k = 0; k < rec.nmse_per_iteration.size(); ++k) {
      body += std::to_string(k + 1) + ',' +
              format_g17(rec.nmse_per_iteration[k]) + '\n';
    }
    atomic_write(cfg.out_dir / cfg.out, body);
    std::printf("trajectory: %s\n", (cfg.out_dir / cfg.out).c_str());
  }
  if (rec.failed) {
    throw NumericError("trial failed: " + rec.error);
  }
  std::printf("final_nmse=%s\n", format_g17(rec.final_nmse()).c_str());
}

void execute_sweep(const CliConfig& cfg) {
  const fs::path summary_path = cfg.out_dir / "summary.csv";
  const fs::path minima_path = cfg.out_dir / "minima.csv";
  const fs::path trials_path = cfg.out_dir / "trials.csv";
  check_writable(summary_path);

  const SweepResult res = run_grid(cfg.to_plan());

  write_cell_summary_csv(summary_path, res);
  write_minima_csv(minima_path, res);
  if (cfg.per_trial) write_trial_csv(trials_path, res);

  for (const auto& m : res.minima) {
    std::printf("min %s %s: d=%g e=%g nmse=%s\n", to_string(m.damping),
                to_string(m.mode), m.d, m.e, format_g17(m.nmse).c_str());
  }
  std::printf("summary: %s\n", summary_path.c_str());
}

void execute_gen_matrix_stats(const CliConfig& cfg) {
  if (!cfg.out.empty()) check_writable(cfg.out_dir / cfg.out);

  double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  double worst_frob = 0.0;
  std::string body = "draw,seed,kappa\n";
  const double target = std::sqrt(static_cast<double>(cfg.ensemble.N));
  for (int i = 0; i < cfg.draws; ++i) {
    const std::uint64_t seed = derive_seed(cfg.ensemble.master_seed, 0, i);
    Rng rng(seed);
    const MatrixDraw draw = gen_sensing_matrix(cfg.ensemble, rng);
    sum += draw.kappa;
    lo = std::min(lo, draw.kappa);
    hi = std::max(hi, draw.kappa);
    worst_frob = std::max(worst_frob, std::abs(draw.A.norm() - target));
    if (!cfg.out.empty()) {
      body += std::to_string(i) + ',' + std::to_string(seed) + ',' +
              format_g17(draw.kappa) + '\n';
    }
  }
  std::printf("draws=%d mean_kappa=%.6f min_kappa=%.6f max_kappa=%.6f "
              "max_frob_err=%.3e\n",
              cfg.draws, sum / cfg.draws, lo, hi, worst_frob);
  if (!cfg.out.empty()) {
    atomic_write(cfg.out_dir / cfg.out, body);
  }
}

}  // namespace

void execute(const CliConfig& cfg) {
  switch (cfg.command) {
    case CliConfig::Command::Run: execute_run(cfg); break;
    case CliConfig::Command::Sweep: execute_sweep(cfg); break;
    case CliConfig::Command::GenMatrixStats: execute_gen_matrix_stats(cfg); break;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const CliConfig cfg = parse_and_validate(args);
    execute(cfg);
    return 0;
  } catch (const HelpRequested& help) {
    std::cout << help.text;
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fracvamp::cli
