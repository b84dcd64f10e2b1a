#include <benchmark/benchmark.h>

#include "fracvamp/ensemble.hpp"
#include "fracvamp/prior.hpp"
#include "fracvamp/solver.hpp"

using namespace fracvamp;

namespace {

struct Fixture {
  MatrixXd A;
  VectorXd y;
  VectorXd x;
  double sigma_n2;

  explicit Fixture(int n = 258, int m = 129, int s = 12) {
    EnsembleSpec spec;
    spec.N = n;
    spec.M = m;
    spec.s = s;
    Rng rng(1234);
    A = gen_sensing_matrix(spec, rng).A;
    x = gen_signal(n, s, rng);
    const Observation obs = gen_observation(A, x, 17.0, rng);
    y = obs.y;
    sigma_n2 = obs.sigma_n2;
  }
};

void BM_Denoise(benchmark::State& state) {
  const BernoulliGaussPrior prior{12.0 / 258.0, 1.0};
  double xt = -1.3;
  for (auto _ : state) {
    const TiltedMoments tm = denoise(prior, xt, 0.03);
    benchmark::DoNotOptimize(tm);
    xt = -xt;
  }
}
BENCHMARK(BM_Denoise);

void BM_DenoiseNumeric(benchmark::State& state) {
  const BernoulliGaussPrior prior{12.0 / 258.0, 1.0};
  for (auto _ : state) {
    const TiltedMoments tm = denoise_numeric(prior, 0.5, 0.1);
    benchmark::DoNotOptimize(tm);
  }
}
BENCHMARK(BM_DenoiseNumeric);

void BM_LmmseFractional(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Fixture fx(n, n / 2, n / 20 + 1);
  const ChannelModel ch(fx.A, fx.y, fx.sigma_n2);
  const VectorXd xt = VectorXd::Zero(n);
  const ArrayXd phi = ArrayXd::Constant(n, 0.05);
  LmmseWorkspace ws;
  for (auto _ : state) {
    const LinearEstimate le = lmmse_fractional(ch, 1.5, xt, phi, &ws);
    benchmark::DoNotOptimize(le);
  }
}
BENCHMARK(BM_LmmseFractional)->Arg(64)->Arg(128)->Arg(258);

void BM_SolverRun(benchmark::State& state) {
  const Fixture fx;
  const ChannelModel ch(fx.A, fx.y, fx.sigma_n2);
  const BernoulliGaussPrior prior{12.0 / 258.0, 1.0};
  SolverConfig cfg;
  cfg.d = 0.8;
  cfg.e = 2.0;
  cfg.damping = DampingCase::Onle;
  cfg.prior_variance = prior.rho;
  for (auto _ : state) {
    const IterateHistory hist = run(ch, prior, cfg);
    benchmark::DoNotOptimize(hist);
  }
}
BENCHMARK(BM_SolverRun)->Unit(benchmark::kMillisecond);

void BM_GenSensingMatrix(benchmark::State& state) {
  EnsembleSpec spec;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(derive_seed(42, 0, seed++));
    const MatrixDraw draw = gen_sensing_matrix(spec, rng);
    benchmark::DoNotOptimize(draw);
  }
}
BENCHMARK(BM_GenSensingMatrix)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
