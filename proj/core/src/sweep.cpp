#include "fracvamp/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace fracvamp {

namespace {

// Neumaier compensated sum; keeps trial means independent of magnitude order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += (std::abs(sum_) >= std::abs(x)) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Instance {
  MatrixXd A;
  VectorXd y;
  double sigma_n2 = 0.0;
  VectorXd x;
  double kappa = 0.0;
};

Instance make_instance(const EnsembleSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  Instance inst;
  MatrixDraw draw = gen_sensing_matrix(spec, rng);
  inst.A = std::move(draw.A);
  inst.kappa = draw.kappa;
  inst.x = gen_signal(spec.N, spec.s, rng, spec.support_model,
                      spec.active_variance);
  Observation obs = gen_observation(inst.A, inst.x, spec.snr_db, rng);
  inst.y = std::move(obs.y);
  inst.sigma_n2 = obs.sigma_n2;
  return inst;
}

TrialRecord solve_instance(const Instance& inst, const EnsembleSpec& spec,
                           const SolverConfig& cfg) {
  TrialRecord rec;
  rec.d = cfg.d;
  rec.e = cfg.e;
  rec.damping = cfg.damping;
  rec.mode = cfg.variance_mode;
  rec.kappa = inst.kappa;

  const ChannelModel ch(inst.A, inst.y, inst.sigma_n2);
  const BernoulliGaussPrior prior{static_cast<double>(spec.s) / spec.N,
                                  spec.active_variance};

  const IterateHistory hist = run(ch, prior, cfg);
  rec.failed = hist.failed;
  rec.error = hist.error;
  rec.clip_events = hist.total_clip_events();
  rec.bounds_violations = hist.total_bounds_violations();

  rec.nmse_per_iteration.reserve(hist.nle_means.size());
  for (const auto& m : hist.nle_means) {
    const VectorXd kept = support_threshold(m.matrix(), spec.s);
    const double err = nmse(inst.x, kept);
    rec.nmse_per_iteration.push_back(err);
    if (!std::isfinite(err) && !rec.failed) {
      rec.failed = true;
      rec.error = "non-finite nmse at iteration " +
                  std::to_string(rec.nmse_per_iteration.size());
    }
  }
  return rec;
}

}  // namespace

double TrialRecord::final_nmse() const {
  return nmse_per_iteration.empty()
             ? std::numeric_limits<double>::quiet_NaN()
             : nmse_per_iteration.back();
}

void SweepPlan::validate() const {
  ensemble.validate();
  base.validate();
  if (d_grid.empty() || e_grid.empty()) {
    throw ConfigError("SweepPlan: d and e grids must be nonempty");
  }
  if (cases.empty() || modes.empty()) {
    throw ConfigError("SweepPlan: case and mode lists must be nonempty");
  }
  for (double d : d_grid) {
    if (!(d > 0.0 && d <= 1.0)) {
      throw ConfigError("SweepPlan: grid d values must lie in (0, 1]");
    }
  }
  for (double e : e_grid) {
    if (!(e > 0.0)) throw ConfigError("SweepPlan: grid e values must be > 0");
  }
  if (threads < 0) throw ConfigError("SweepPlan: threads must be >= 0");
}

TrialRecord run_trial(const EnsembleSpec& spec, const SolverConfig& cfg,
                      int cell_id, int trial) {
  TrialRecord rec = run_trial_seeded(
      spec, cfg, derive_seed(spec.master_seed, cell_id, trial));
  rec.cell_id = cell_id;
  rec.trial = trial;
  return rec;
}

TrialRecord run_trial_seeded(const EnsembleSpec& spec, const SolverConfig& cfg,
                             std::uint64_t seed) {
  spec.validate();
  cfg.validate();
  TrialRecord rec = solve_instance(make_instance(spec, seed), spec, cfg);
  rec.seed = seed;
  return rec;
}

const CellSummary* SweepResult::find_cell(DampingCase c, VarianceMode m,
                                          double d, double e) const {
  for (const auto& cell : cells) {
    if (cell.damping == c && cell.mode == m && cell.d == d && cell.e == e) {
      return &cell;
    }
  }
  return nullptr;
}

SweepResult run_grid(const SweepPlan& plan) {
  plan.validate();
  const auto& spec = plan.ensemble;
  const int n_d = static_cast<int>(plan.d_grid.size());
  const int n_e = static_cast<int>(plan.e_grid.size());
  const int n_de = n_d * n_e;
  const int n_cm = static_cast<int>(plan.cases.size() * plan.modes.size());
  const int trials = spec.trials;

  SweepResult result;
  result.iterations = plan.base.max_iterations;
  result.trials.resize(static_cast<std::size_t>(n_cm) * n_de * trials);

  // Work item = one trial: a single instance drawn from (master_seed, trial)
  // and solved in every grid cell. Sharing instances across cells pairs the
  // per-cell means, which sharpens cross-cell comparisons considerably at
  // desk-scale trial counts; it also cuts the matrix generation cost.
  const int n_items = trials;
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  const auto worker = [&]() {
    for (;;) {
      const int trial = next.fetch_add(1, std::memory_order_relaxed);
      if (trial >= n_items) return;
      try {
        const std::uint64_t seed = derive_seed(spec.master_seed, 0, trial);
        const Instance inst = make_instance(spec, seed);
        for (int cell_id = 0; cell_id < n_de; ++cell_id) {
          int cm = 0;
          for (const DampingCase dcase : plan.cases) {
            for (const VarianceMode mode : plan.modes) {
              SolverConfig cfg = plan.base;
              cfg.d = plan.d_grid[cell_id / n_e];
              cfg.e = plan.e_grid[cell_id % n_e];
              cfg.damping = dcase;
              cfg.variance_mode = mode;
              TrialRecord rec = solve_instance(inst, spec, cfg);
              rec.cell_id = cell_id;
              rec.trial = trial;
              rec.seed = seed;
              const std::size_t slot =
                  (static_cast<std::size_t>(cm) * n_de + cell_id) * trials +
                  trial;
              result.trials[slot] = std::move(rec);
              ++cm;
            }
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int n_threads = plan.threads > 0
                      ? plan.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  if (n_threads > n_items) n_threads = n_items;

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Aggregate in fixed slot order so summaries are reproducible bit for bit.
  result.cells.reserve(static_cast<std::size_t>(n_cm) * n_de);
  int cm = 0;
  for (const DampingCase dcase : plan.cases) {
    for (const VarianceMode mode : plan.modes) {
      for (int cell_id = 0; cell_id < n_de; ++cell_id) {
        CellSummary cell;
        cell.damping = dcase;
        cell.mode = mode;
        cell.d = plan.d_grid[cell_id / n_e];
        cell.e = plan.e_grid[cell_id % n_e];
        cell.trials = trials;

        CompensatedSum nmse_sum, kappa_sum;
        std::vector<double> valid;
        valid.reserve(trials);
        for (int trial = 0; trial < trials; ++trial) {
          const std::size_t slot =
              (static_cast<std::size_t>(cm) * n_de + cell_id) * trials + trial;
          const TrialRecord& rec = result.trials[slot];
          kappa_sum.add(rec.kappa);
          cell.bounds_violations += rec.bounds_violations;
          if (rec.failed) {
            ++cell.fail_count;
          } else {
            nmse_sum.add(rec.final_nmse());
            valid.push_back(rec.final_nmse());
          }
        }
        cell.mean_kappa = kappa_sum.value() / trials;
        if (!valid.empty()) {
          cell.mean_nmse = nmse_sum.value() / static_cast<double>(valid.size());
          CompensatedSum sq;
          for (double x : valid) {
            sq.add((x - cell.mean_nmse) * (x - cell.mean_nmse));
          }
          cell.std_nmse =
              valid.size() > 1
                  ? std::sqrt(sq.value() / static_cast<double>(valid.size() - 1))
                  : 0.0;
        } else {
          cell.mean_nmse = std::numeric_limits<double>::quiet_NaN();
          cell.std_nmse = std::numeric_limits<double>::quiet_NaN();
        }
        result.cells.push_back(cell);
      }
      ++cm;
    }
  }

  // Minima per (case, mode), mirroring the summary table layout.
  for (const DampingCase dcase : plan.cases) {
    for (const VarianceMode mode : plan.modes) {
      const CellSummary* best = nullptr;
      for (const auto& cell : result.cells) {
        if (cell.damping != dcase || cell.mode != mode) continue;
        if (!std::isfinite(cell.mean_nmse)) continue;
        if (!best || cell.mean_nmse < best->mean_nmse) best = &cell;
      }
      if (best) {
        result.minima.push_back(
            {dcase, mode, best->d, best->e, best->mean_nmse});
      }
    }
  }
  return result;
}

}  // namespace fracvamp
