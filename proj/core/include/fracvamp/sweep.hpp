#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracvamp/ensemble.hpp"
#include "fracvamp/solver.hpp"

namespace fracvamp {

// One grid sweep: every (damping case, variance mode) pair is evaluated on
// the full (d, e) grid. Trial t uses one instance, drawn from
// (master_seed, t) and shared by every cell, so cell means are paired and
// cross-cell comparisons do not carry independent instance noise.
struct SweepPlan {
  EnsembleSpec ensemble;
  std::vector<double> d_grid{1.0};
  std::vector<double> e_grid{1.0};
  std::vector<DampingCase> cases{DampingCase::Onle};
  std::vector<VarianceMode> modes{VarianceMode::Individual,
                                  VarianceMode::Average};
  SolverConfig base;  // d, e, damping, variance_mode overridden per cell
  int threads = 0;    // 0 means hardware concurrency

  void validate() const;
};

struct TrialRecord {
  int cell_id = 0;  // index into the (d, e) grid
  DampingCase damping = DampingCase::None;
  VarianceMode mode = VarianceMode::Individual;
  double d = 1.0;
  double e = 1.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double kappa = 0.0;
  std::vector<double> nmse_per_iteration;  // support-thresholded, per iteration
  bool failed = false;
  std::string error;
  long clip_events = 0;
  long bounds_violations = 0;

  double final_nmse() const;
};

struct CellSummary {
  DampingCase damping = DampingCase::None;
  VarianceMode mode = VarianceMode::Individual;
  double d = 1.0;
  double e = 1.0;
  double mean_nmse = 0.0;  // over non-failed trials, final iteration
  double std_nmse = 0.0;
  long fail_count = 0;
  int trials = 0;
  double mean_kappa = 0.0;
  long bounds_violations = 0;
};

struct SweepResult {
  std::vector<CellSummary> cells;    // case-major, then mode, then d, then e
  std::vector<TrialRecord> trials;   // same order, trial-minor
  int iterations = 0;

  struct Minimum {
    DampingCase damping;
    VarianceMode mode;
    double d;
    double e;
    double nmse;
  };
  // argmin of mean_nmse per (case, mode), mirroring the grid-minima table
  std::vector<Minimum> minima;

  const CellSummary* find_cell(DampingCase c, VarianceMode m, double d,
                               double e) const;
};

// One instance + one solve, seeded from (master_seed, cell_id, trial).
TrialRecord run_trial(const EnsembleSpec& spec, const SolverConfig& cfg,
                      int cell_id, int trial);
// Same with an explicit seed (single-run front end).
TrialRecord run_trial_seeded(const EnsembleSpec& spec, const SolverConfig& cfg,
                             std::uint64_t seed);

// Executes the whole plan over a thread pool. Results depend only on
// (master_seed, cell, trial); the thread count never changes them.
SweepResult run_grid(const SweepPlan& plan);

}  // namespace fracvamp
