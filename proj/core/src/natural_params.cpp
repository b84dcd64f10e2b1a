#include "fracvamp/natural_params.hpp"

#include <string>

namespace fracvamp {

namespace {

void require_same_size(const NaturalParams& a, const NaturalParams& b,
                       const char* where) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(where) + ": size mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

void require_positive_e(double e, const char* where) {
  if (!(e > 0.0)) {
    throw ConfigError(std::string(where) + ": fractional parameter e must be > 0, got " +
                      std::to_string(e));
  }
}

}  // namespace

void ClipBounds::validate() const {
  for (const Interval& iv : {nle, other}) {
    if (!(iv.lo > 0.0)) throw ConfigError("clip interval lower bound must be > 0");
    if (!(iv.lo <= iv.hi)) throw ConfigError("clip interval must satisfy lo <= hi");
  }
}

NaturalParams moments_to_natural(const MomentParams& m) {
  if (m.mean.size() != m.variance.size()) {
    throw std::invalid_argument("moments_to_natural: size mismatch");
  }
  if ((m.variance == 0.0).any()) {
    throw std::domain_error("moments_to_natural: zero variance");
  }
  return {m.mean / m.variance, m.variance.inverse()};
}

MomentParams natural_to_moments(const NaturalParams& eta) {
  if (eta.lambda.size() != eta.precision.size()) {
    throw std::invalid_argument("natural_to_moments: size mismatch");
  }
  if ((eta.precision <= 0.0).any()) {
    throw std::domain_error("natural_to_moments: non-positive precision");
  }
  return {eta.lambda / eta.precision, eta.precision.inverse()};
}

NaturalParams ec_cavity_update(const NaturalParams& eta_full,
                               const NaturalParams& eta_cav_own) {
  require_same_size(eta_full, eta_cav_own, "ec_cavity_update");
  return {eta_full.lambda - eta_cav_own.lambda,
          eta_full.precision - eta_cav_own.precision};
}

NaturalParams frac_cavity_to_nle(const NaturalParams& eta_lin,
                                 const NaturalParams& eta_cav_lin, double e) {
  require_same_size(eta_lin, eta_cav_lin, "frac_cavity_to_nle");
  require_positive_e(e, "frac_cavity_to_nle");
  return {e * (eta_lin.lambda - eta_cav_lin.lambda),
          e * (eta_lin.precision - eta_cav_lin.precision)};
}

NaturalParams frac_cavity_to_lin(const NaturalParams& eta_nle,
                                 const NaturalParams& eta_cav_nle, double e) {
  require_same_size(eta_nle, eta_cav_nle, "frac_cavity_to_lin");
  require_positive_e(e, "frac_cavity_to_lin");
  return {eta_nle.lambda - eta_cav_nle.lambda / e,
          eta_nle.precision - eta_cav_nle.precision / e};
}

NaturalParams clip(const NaturalParams& eta, const ClipBounds& bounds,
                   ClipKind kind, long* events) {
  bounds.validate();
  const Interval iv = (kind == ClipKind::Nle) ? bounds.nle : bounds.other;
  NaturalParams out = eta;
  for (Index j = 0; j < eta.size(); ++j) {
    const double p = eta.precision[j];
    if (p <= 0.0 || !std::isfinite(p)) {
      // Negative (or broken) precision: rescue to the least-informative
      // admissible state.
      out.precision[j] = iv.lo;
      out.lambda[j] = 0.0;
      if (events) ++*events;
    } else if (p < iv.lo || p > iv.hi) {
      const double clipped = (p < iv.lo) ? iv.lo : iv.hi;
      out.precision[j] = clipped;
      out.lambda[j] = eta.lambda[j] * (clipped / p);  // keep mean lambda/Lambda
      if (events) ++*events;
    }
  }
  return out;
}

double average_variance(const ArrayXd& variances) {
  if (variances.size() == 0) {
    throw std::domain_error("average_variance: empty input");
  }
  return variances.mean();
}

}  // namespace fracvamp
