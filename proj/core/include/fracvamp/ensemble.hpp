#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "fracvamp/errors.hpp"
#include "fracvamp/rng.hpp"

namespace fracvamp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Whether test signals carry exactly s non-zeros or i.i.d. Bernoulli(s/N)
// activity. Exact counts match the known-sparsity thresholding used for
// evaluation.
enum class SupportModel { ExactCount, IidBernoulli };

// One Monte Carlo setup: problem dimensions, noise level, power-profile
// factor, and the reproducibility seed.
struct EnsembleSpec {
  int N = 258;
  int M = 129;
  int s = 12;
  double snr_db = 17.0;  // -10 log10(sigma_n^2)
  double v = 0.2;        // geometric power-profile factor in (0, 1]
  int trials = 200;
  std::uint64_t master_seed = 2020;
  SupportModel support_model = SupportModel::ExactCount;
  double active_variance = 1.0;

  void validate() const;
};

struct MatrixDraw {
  MatrixXd A;
  double kappa;  // condition number (ratio of extreme singular values)
};

// i.i.d. Gaussian M x N matrix; column j is scaled by v^((p-1)/(N-1)) through
// a fresh uniform permutation p -> j, then the whole matrix is rescaled to
// Frobenius norm sqrt(N).
MatrixDraw gen_sensing_matrix(const EnsembleSpec& spec, Rng& rng);

// Sparse test signal; non-zero amplitudes are N(0, active_variance).
VectorXd gen_signal(int N, int s, Rng& rng,
                    SupportModel model = SupportModel::ExactCount,
                    double active_variance = 1.0);

struct Observation {
  VectorXd y;
  double sigma_n2;
};

// y = A x + n with sigma_n^2 = 10^(-snr_db / 10).
Observation gen_observation(const MatrixXd& A, const VectorXd& x,
                            double snr_db, Rng& rng);

// Keeps the s largest-magnitude entries, zeroes the rest; ties keep the
// lowest index.
VectorXd support_threshold(const VectorXd& m, int s);

// Per-symbol normalized mean-squared error: ||x - x_hat||^2 / ||x||^2 / N.
double nmse(const VectorXd& x, const VectorXd& x_hat);

}  // namespace fracvamp
