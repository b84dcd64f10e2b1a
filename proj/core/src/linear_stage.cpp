#include "fracvamp/linear_stage.hpp"

#include <string>
#include <utility>

#include <Eigen/Cholesky>

namespace fracvamp {

ChannelModel::ChannelModel(MatrixXd A_, VectorXd y_, double sigma_n2_)
    : A(std::move(A_)), y(std::move(y_)), sigma_n2(sigma_n2_) {
  if (A.rows() != y.size()) {
    throw ConfigError("ChannelModel: A has " + std::to_string(A.rows()) +
                      " rows but y has " + std::to_string(y.size()) +
                      " entries");
  }
  if (!(sigma_n2 > 0.0)) {
    throw ConfigError("ChannelModel: noise variance must be > 0");
  }
  AtA.noalias() = A.transpose() * A;
  Aty.noalias() = A.transpose() * y;
}

double effective_noise_variance(double sigma_n2, double e) {
  if (!(sigma_n2 > 0.0)) throw ConfigError("effective_noise_variance: sigma_n2 must be > 0");
  if (!(e > 0.0)) throw ConfigError("effective_noise_variance: e must be > 0");
  return e * sigma_n2;
}

LinearEstimate lmmse_fractional(const ChannelModel& ch, double e,
                                const VectorXd& x_tilde,
                                const ArrayXd& phi_tilde_diag,
                                LmmseWorkspace* ws, int iteration) {
  const Index n = ch.cols();
  if (x_tilde.size() != n || phi_tilde_diag.size() != n) {
    throw std::invalid_argument("lmmse_fractional: size mismatch");
  }
  if ((phi_tilde_diag <= 0.0).any()) {
    throw std::domain_error("lmmse_fractional: phi_tilde_diag must be > 0");
  }
  const double en2 = effective_noise_variance(ch.sigma_n2, e);

  LmmseWorkspace local;
  if (!ws) ws = &local;

  ws->system = ch.AtA;
  ws->system.diagonal().array() += en2 * phi_tilde_diag.inverse();

  Eigen::LLT<Eigen::Ref<MatrixXd>> llt(ws->system);
  if (llt.info() != Eigen::Success) {
    throw NumericError(
        "lmmse_fractional: system matrix not positive definite" +
            (iteration >= 0 ? " at iteration " + std::to_string(iteration)
                            : std::string()),
        iteration);
  }

  ws->resid.noalias() = ch.Aty - ch.AtA * x_tilde;

  LinearEstimate out;
  out.mean = x_tilde + llt.solve(ws->resid);

  // diag(S^-1)_j = || L^-1 e_j ||^2, so one triangular solve against the
  // identity yields the whole diagonal from the existing factor.
  ws->linv = MatrixXd::Identity(n, n);
  llt.matrixL().solveInPlace(ws->linv);
  out.variance_diag = en2 * ws->linv.colwise().squaredNorm().transpose().array();

  return out;
}

}  // namespace fracvamp
