#include "fracvamp/solver.hpp"

#include <cmath>
#include <numeric>

namespace fracvamp {

const char* to_string(DampingCase c) {
  switch (c) {
    case DampingCase::None: return "none";
    case DampingCase::Onle: return "onle";
    case DampingCase::Olin: return "olin";
    case DampingCase::Cnle: return "cnle";
  }
  return "?";
}

const char* to_string(VarianceMode m) {
  return m == VarianceMode::Individual ? "individual" : "average";
}

DampingCase parse_damping_case(const std::string& s) {
  if (s == "none") return DampingCase::None;
  if (s == "onle") return DampingCase::Onle;
  if (s == "olin") return DampingCase::Olin;
  if (s == "cnle") return DampingCase::Cnle;
  throw ConfigError("unknown damping case '" + s +
                    "' (expected none|onle|olin|cnle)");
}

VarianceMode parse_variance_mode(const std::string& s) {
  if (s == "individual") return VarianceMode::Individual;
  if (s == "average") return VarianceMode::Average;
  throw ConfigError("unknown variance mode '" + s +
                    "' (expected individual|average)");
}

void SolverConfig::validate() const {
  if (!(d > 0.0 && d <= 1.0)) {
    throw ConfigError("SolverConfig: d must lie in (0, 1], got " +
                      std::to_string(d));
  }
  if (!(e > 0.0)) {
    throw ConfigError("SolverConfig: e must be > 0, got " + std::to_string(e));
  }
  if (max_iterations < 1) {
    throw ConfigError("SolverConfig: max_iterations must be >= 1");
  }
  if (!(prior_variance > 0.0)) {
    throw ConfigError("SolverConfig: prior_variance must be > 0");
  }
  clip.validate();
}

long IterateHistory::total_clip_events() const {
  long n = 0;
  for (const auto& d : diags) n += d.clip_events;
  return n;
}

long IterateHistory::total_bounds_violations() const {
  long n = 0;
  for (const auto& d : diags) n += d.bounds_violations;
  return n;
}

SolverState initialize(const ChannelModel& ch, const SolverConfig& cfg) {
  cfg.validate();
  const Index n = ch.cols();
  SolverState st;
  st.x_tilde_lin = ArrayXd::Zero(n);
  st.phi_tilde_lin_diag = ArrayXd::Constant(n, cfg.prior_variance);
  st.eta_nle.lambda = ArrayXd::Zero(n);
  st.eta_nle.precision = ArrayXd::Constant(n, 1.0 / cfg.prior_variance);
  st.eta_nle_old = st.eta_nle;
  st.eta_cav_nle = NaturalParams::zero(n);
  st.eta_cav_lin = {ArrayXd::Zero(n), ArrayXd::Constant(n, 1.0 / cfg.prior_variance)};
  st.iteration = 0;
  return st;
}

namespace {

// d*a + (1-d)*b, arranged to return a bit-exactly at d = 1.
NaturalParams damp(const NaturalParams& a, const NaturalParams& b, double d) {
  if (d == 1.0) return a;
  return {d * a.lambda + (1.0 - d) * b.lambda,
          d * a.precision + (1.0 - d) * b.precision};
}

bool all_finite(const ArrayXd& a) { return a.isFinite().all(); }

}  // namespace

SolverState step(const SolverState& state, const ChannelModel& ch,
                 const BernoulliGaussPrior& prior, const SolverConfig& cfg,
                 StepOutput* out, LmmseWorkspace* ws) {
  cfg.validate();
  prior.validate();
  const Index n = ch.cols();
  const int it = state.iteration;
  const bool clip_all = cfg.clip_policy == ClipPolicy::AllFormations;
  long clip_events = 0;

  // Linear stage
  const LinearEstimate le =
      lmmse_fractional(ch, cfg.e, state.x_tilde_lin.matrix(),
                       state.phi_tilde_lin_diag, ws, it);

  ArrayXd var_lin = le.variance_diag;
  const double mean_var_lin = var_lin.mean();
  if (cfg.variance_mode == VarianceMode::Average) {
    var_lin.setConstant(average_variance(le.variance_diag));
  }
  NaturalParams eta_lin = moments_to_natural({le.mean.array(), var_lin});
  if (clip_all) eta_lin = clip(eta_lin, cfg.clip, ClipKind::Other, &clip_events);

  const NaturalParams eta_lin_raw = eta_lin;
  if (cfg.damping == DampingCase::Olin) {
    eta_lin = damp(eta_lin, state.eta_nle, cfg.d);
    if (clip_all) eta_lin = clip(eta_lin, cfg.clip, ClipKind::Other, &clip_events);
  }

  // Cavity toward the NLE; always clipped so the moment conversion is defined.
  NaturalParams eta_cav_nle = frac_cavity_to_nle(eta_lin, state.eta_cav_lin, cfg.e);
  eta_cav_nle = clip(eta_cav_nle, cfg.clip, ClipKind::Other, &clip_events);
  const MomentParams cav_nle = natural_to_moments(eta_cav_nle);

  // Componentwise non-linear estimators
  ArrayXd nle_mean(n), nle_var(n);
  for (Index j = 0; j < n; ++j) {
    const TiltedMoments tm = denoise(prior, cav_nle.mean[j], cav_nle.variance[j]);
    nle_mean[j] = tm.mean;
    nle_var[j] = tm.variance;
  }
  const double mean_var_nle = nle_var.mean();
  if (cfg.variance_mode == VarianceMode::Average) {
    nle_var.setConstant(average_variance(nle_var));
  }

  SolverState next;
  next.eta_nle_old = state.eta_nle;

  NaturalParams eta_nle = moments_to_natural({nle_mean, nle_var});
  if (clip_all) eta_nle = clip(eta_nle, cfg.clip, ClipKind::Nle, &clip_events);
  if (cfg.damping == DampingCase::Onle) {
    eta_nle = damp(eta_nle, eta_lin, cfg.d);
    if (clip_all) eta_nle = clip(eta_nle, cfg.clip, ClipKind::Nle, &clip_events);
  } else if (cfg.damping == DampingCase::Cnle) {
    eta_nle = damp(eta_nle, next.eta_nle_old, cfg.d);
    if (clip_all) eta_nle = clip(eta_nle, cfg.clip, ClipKind::Nle, &clip_events);
  }

  // Cavity back toward the linear stage
  NaturalParams eta_cav_lin = frac_cavity_to_lin(eta_nle, eta_cav_nle, cfg.e);
  eta_cav_lin = clip(eta_cav_lin, cfg.clip, ClipKind::Other, &clip_events);
  const MomentParams cav_lin = natural_to_moments(eta_cav_lin);

  next.eta_nle = std::move(eta_nle);
  next.eta_cav_nle = std::move(eta_cav_nle);
  next.eta_cav_lin = std::move(eta_cav_lin);
  next.x_tilde_lin = cav_lin.mean;
  next.phi_tilde_lin_diag = cav_lin.variance;
  next.iteration = it + 1;

  if (cfg.divergence_guard &&
      !(all_finite(next.eta_nle.lambda) && all_finite(next.eta_nle.precision) &&
        all_finite(next.x_tilde_lin) && all_finite(next.phi_tilde_lin_diag) &&
        all_finite(nle_mean))) {
    throw NumericError("solver: non-finite state after iteration " +
                           std::to_string(it + 1),
                       it + 1);
  }

  if (out) {
    out->nle_mean = std::move(nle_mean);
    out->diag.mean_var_lin = mean_var_lin;
    out->diag.mean_var_nle = mean_var_nle;
    out->diag.clip_events = clip_events;
    out->diag.bounds_violations = 0;
    const auto count_outside = [&](const ArrayXd& p, const Interval& iv) {
      out->diag.bounds_violations += (p < iv.lo || p > iv.hi).count();
    };
    count_outside(next.eta_nle.precision, cfg.clip.nle);
    count_outside(next.eta_cav_nle.precision, cfg.clip.other);
    count_outside(next.eta_cav_lin.precision, cfg.clip.other);
    if (cfg.record_params) {
      out->snapshot = {eta_lin_raw, eta_lin, next.eta_nle, next.eta_cav_nle,
                       next.eta_cav_lin};
    }
  }
  return next;
}

IterateHistory run(const ChannelModel& ch, const BernoulliGaussPrior& prior,
                   const SolverConfig& cfg) {
  cfg.validate();
  IterateHistory hist;
  hist.nle_means.reserve(cfg.max_iterations);
  hist.diags.reserve(cfg.max_iterations);

  SolverState state = initialize(ch, cfg);
  LmmseWorkspace ws;
  StepOutput out;
  for (int k = 0; k < cfg.max_iterations; ++k) {
    try {
      state = step(state, ch, prior, cfg, &out, &ws);
    } catch (const NumericError& err) {
      hist.failed = true;
      hist.failed_iteration = k + 1;
      hist.error = err.what();
      break;
    }
    hist.nle_means.push_back(std::move(out.nle_mean));
    hist.diags.push_back(out.diag);
    if (cfg.record_params) hist.snapshots.push_back(std::move(out.snapshot));
  }
  return hist;
}

}  // namespace fracvamp
