#pragma once

#include <string>
#include <vector>

#include "fracvamp/linear_stage.hpp"
#include "fracvamp/natural_params.hpp"
#include "fracvamp/prior.hpp"

namespace fracvamp {

// Damping variants: convex combination d*a + (1-d)*b of natural parameters.
//   Onle - after the NLE, combines eta_nle with eta_lin
//   Olin - after the LE, combines eta_lin with eta_nle
//   Cnle - combines eta_nle of successive iterations
enum class DampingCase { None, Onle, Olin, Cnle };

// Individual keeps per-component variances; Average replaces them by their
// mean before natural parameters are formed.
enum class VarianceMode { Individual, Average };

// Where precisions are clipped: after every natural-parameter formation and
// damping combination (default), or only on the cavity parameters (the
// minimum needed to keep the iteration defined).
enum class ClipPolicy { AllFormations, CavitiesOnly };

const char* to_string(DampingCase c);
const char* to_string(VarianceMode m);
DampingCase parse_damping_case(const std::string& s);
VarianceMode parse_variance_mode(const std::string& s);

struct SolverConfig {
  double d = 1.0;  // damping factor in (0, 1]; 1 means no damping
  double e = 1.0;  // fractional parameter, > 0; 1 recovers the standard update
  DampingCase damping = DampingCase::None;
  VarianceMode variance_mode = VarianceMode::Individual;
  ClipBounds clip{};
  ClipPolicy clip_policy = ClipPolicy::AllFormations;
  int max_iterations = 20;
  double prior_variance = 1.0;  // sigma_x^2 used by the initialization
  bool divergence_guard = true;
  bool record_params = false;  // keep per-iteration parameter snapshots

  void validate() const;
};

struct SolverState {
  NaturalParams eta_nle;
  NaturalParams eta_nle_old;
  NaturalParams eta_cav_nle;
  NaturalParams eta_cav_lin;
  ArrayXd x_tilde_lin;
  ArrayXd phi_tilde_lin_diag;
  int iteration = 0;
};

struct IterationDiag {
  double mean_var_lin = 0.0;
  double mean_var_nle = 0.0;
  long clip_events = 0;
  long bounds_violations = 0;  // stored precisions outside their interval
};

// Per-iteration parameter snapshots, recorded only on request.
struct ParamSnapshot {
  NaturalParams eta_lin_raw;  // straight from the linear estimate
  NaturalParams eta_lin;      // after damping (equal to raw unless Olin)
  NaturalParams eta_nle;
  NaturalParams eta_cav_nle;
  NaturalParams eta_cav_lin;
};

struct StepOutput {
  ArrayXd nle_mean;
  IterationDiag diag;
  ParamSnapshot snapshot;  // filled only when cfg.record_params
};

struct IterateHistory {
  std::vector<ArrayXd> nle_means;
  std::vector<IterationDiag> diags;
  std::vector<ParamSnapshot> snapshots;
  bool failed = false;
  int failed_iteration = -1;
  std::string error;

  long total_clip_events() const;
  long total_bounds_violations() const;
};

// State exactly as the algorithm prescribes: flat zero-mean start with the
// prior variance, NLE cavity cleared.
SolverState initialize(const ChannelModel& ch, const SolverConfig& cfg);

// One full iteration: linear stage, cavity to the NLE, denoising, cavity
// back to the linear stage, with the configured damping, clipping and
// variance averaging applied along the way.
SolverState step(const SolverState& state, const ChannelModel& ch,
                 const BernoulliGaussPrior& prior, const SolverConfig& cfg,
                 StepOutput* out = nullptr, LmmseWorkspace* ws = nullptr);

// Runs exactly cfg.max_iterations steps (no early stopping); on numeric
// failure the history holds all completed iterations plus the error marker.
IterateHistory run(const ChannelModel& ch, const BernoulliGaussPrior& prior,
                   const SolverConfig& cfg);

}  // namespace fracvamp
