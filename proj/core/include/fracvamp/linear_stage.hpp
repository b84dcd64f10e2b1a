#pragma once

#include <Eigen/Core>

#include "fracvamp/errors.hpp"
#include "fracvamp/natural_params.hpp"

namespace fracvamp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Measurement model y = A x + n with i.i.d. Gaussian noise of variance
// sigma_n2. A^T A and A^T y are cached once; every solver iteration reuses
// them.
struct ChannelModel {
  MatrixXd A;
  VectorXd y;
  double sigma_n2 = 1.0;
  MatrixXd AtA;
  VectorXd Aty;

  ChannelModel(MatrixXd A_, VectorXd y_, double sigma_n2_);

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }
};

// Joint linear estimate: mean and the diagonal of the conditional covariance.
struct LinearEstimate {
  VectorXd mean;
  ArrayXd variance_diag;
};

// e * sigma_n2: the noise variance the linear stage effectively assumes.
double effective_noise_variance(double sigma_n2, double e);

// Scratch buffers reused across the iterations of one solver run.
struct LmmseWorkspace {
  MatrixXd system;
  MatrixXd linv;
  VectorXd resid;
};

// Linear MMSE stage with fractional parameter e:
//   mean = x~ + (A^T A + e sn2 P^-1)^-1 A^T (y - A x~)
//   var  = diag( e sn2 (A^T A + e sn2 P^-1)^-1 ),   P = diag(phi_tilde).
// The N x N system matrix is SPD; it is Cholesky-factored once and the
// factor reused both for the mean solve and for the inverse diagonal
// (squared column norms of L^-1). `iteration` only labels errors.
LinearEstimate lmmse_fractional(const ChannelModel& ch, double e,
                                const VectorXd& x_tilde,
                                const ArrayXd& phi_tilde_diag,
                                LmmseWorkspace* ws = nullptr,
                                int iteration = -1);

}  // namespace fracvamp
