#include "fracvamp/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/SVD>

namespace fracvamp {

void EnsembleSpec::validate() const {
  if (N < 1) throw ConfigError("EnsembleSpec: N must be >= 1");
  if (M < 1) throw ConfigError("EnsembleSpec: M must be >= 1");
  if (M > N) throw ConfigError("EnsembleSpec: M must be <= N");
  if (s < 0 || s > N) throw ConfigError("EnsembleSpec: s must lie in [0, N]");
  if (!(v > 0.0 && v <= 1.0)) {
    throw ConfigError("EnsembleSpec: v must lie in (0, 1]");
  }
  if (trials < 1) throw ConfigError("EnsembleSpec: trials must be >= 1");
  if (!(active_variance > 0.0)) {
    throw ConfigError("EnsembleSpec: active_variance must be > 0");
  }
}

MatrixDraw gen_sensing_matrix(const EnsembleSpec& spec, Rng& rng) {
  spec.validate();
  const int m = spec.M, n = spec.N;

  MatrixXd A(m, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) A(i, j) = rng.normal();
  }

  // Geometric power profile r_p = v^((p-1)/(N-1)), assigned to columns
  // through a random permutation. r_p describes the component's transmit
  // power, so column amplitudes scale by sqrt(r_p); this reproduces the
  // reference condition-number statistics (mean ~6.3 at v = 0.2).
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  for (int p = 0; p < n; ++p) {
    const double r =
        (n > 1) ? std::pow(spec.v, 0.5 * static_cast<double>(p) / (n - 1))
                : 1.0;
    A.col(perm[p]) *= r;
  }

  A *= std::sqrt(static_cast<double>(n)) / A.norm();

  const Eigen::BDCSVD<MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  const double kappa = sv(0) / sv(sv.size() - 1);

  return {std::move(A), kappa};
}

VectorXd gen_signal(int N, int s, Rng& rng, SupportModel model,
                    double active_variance) {
  if (s < 0 || s > N) throw ConfigError("gen_signal: s must lie in [0, N]");
  const double amp = std::sqrt(active_variance);
  VectorXd x = VectorXd::Zero(N);
  if (model == SupportModel::ExactCount) {
    // Partial Fisher-Yates: first s entries of a shuffled index set.
    std::vector<int> idx(N);
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < s; ++k) {
      const auto pick = k + static_cast<int>(rng.uniform_int(N - k));
      std::swap(idx[k], idx[pick]);
      x[idx[k]] = amp * rng.normal();
    }
  } else {
    const double rho = static_cast<double>(s) / N;
    for (int j = 0; j < N; ++j) {
      if (rng.uniform() < rho) x[j] = amp * rng.normal();
    }
  }
  return x;
}

Observation gen_observation(const MatrixXd& A, const VectorXd& x,
                            double snr_db, Rng& rng) {
  if (A.cols() != x.size()) {
    throw std::invalid_argument("gen_observation: shape mismatch");
  }
  const double sigma_n2 = std::pow(10.0, -snr_db / 10.0);
  const double sd = std::sqrt(sigma_n2);
  VectorXd y = A * x;
  for (Index i = 0; i < y.size(); ++i) y[i] += sd * rng.normal();
  return {std::move(y), sigma_n2};
}

VectorXd support_threshold(const VectorXd& m, int s) {
  const int n = static_cast<int>(m.size());
  if (s < 0 || s > n) throw ConfigError("support_threshold: s must lie in [0, N]");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(m[a]), mb = std::abs(m[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  VectorXd out = VectorXd::Zero(n);
  for (int k = 0; k < s; ++k) out[idx[k]] = m[idx[k]];
  return out;
}

double nmse(const VectorXd& x, const VectorXd& x_hat) {
  if (x.size() != x_hat.size()) {
    throw std::invalid_argument("nmse: size mismatch");
  }
  const double denom = x.squaredNorm();
  if (!(denom > 0.0)) throw std::domain_error("nmse: zero reference signal");
  return (x - x_hat).squaredNorm() / denom / static_cast<double>(x.size());
}

}  // namespace fracvamp
