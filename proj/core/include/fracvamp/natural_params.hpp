#pragma once

#include <Eigen/Core>

#include "fracvamp/errors.hpp"

namespace fracvamp {

using Eigen::ArrayXd;
using Eigen::Index;

// Per-component Gaussian in natural coordinates:
//   lambda_j = m_j / sigma_j^2,  precision_j = 1 / sigma_j^2.
// Cavity exchanges are additions/subtractions in these coordinates.
struct NaturalParams {
  ArrayXd lambda;
  ArrayXd precision;

  Index size() const { return lambda.size(); }
  static NaturalParams zero(Index n) {
    return {ArrayXd::Zero(n), ArrayXd::Zero(n)};
  }
};

// The same Gaussian in moment coordinates (mean, variance).
struct MomentParams {
  ArrayXd mean;
  ArrayXd variance;

  Index size() const { return mean.size(); }
};

struct Interval {
  double lo;
  double hi;
};

// Precision clip intervals; NLE precisions use a tighter interval than the
// rest of the parameters.
struct ClipBounds {
  Interval nle{1e-8, 1e8};
  Interval other{1e-12, 1e12};

  void validate() const;
};

enum class ClipKind { Nle, Other };

// lambda_j = m_j / var_j, precision_j = 1 / var_j. Zero variance is an error.
NaturalParams moments_to_natural(const MomentParams& m);

// var_j = 1 / precision_j, m_j = lambda_j / precision_j. Requires strictly
// positive precisions: a non-positive precision means a clip step was skipped
// upstream and is surfaced as an error instead of a negative variance.
MomentParams natural_to_moments(const NaturalParams& eta);

// Cavity subtraction, componentwise: eta_full - eta_cav_own. The result may
// carry negative precisions; callers are expected to clip.
NaturalParams ec_cavity_update(const NaturalParams& eta_full,
                               const NaturalParams& eta_cav_own);

// Fractional cavity updates. With e = 1 both reduce to ec_cavity_update.
NaturalParams frac_cavity_to_nle(const NaturalParams& eta_lin,
                                 const NaturalParams& eta_cav_lin, double e);
NaturalParams frac_cavity_to_lin(const NaturalParams& eta_nle,
                                 const NaturalParams& eta_cav_nle, double e);

// Bounds every precision into the interval for its kind. A precision clipped
// while positive keeps its implied mean (lambda is rescaled with it); a
// non-positive precision is mapped to the lower bound with lambda zeroed,
// which encodes "no information". Idempotent. `events`, when given, is
// incremented once per modified component.
NaturalParams clip(const NaturalParams& eta, const ClipBounds& bounds,
                   ClipKind kind, long* events = nullptr);

// Arithmetic mean of a variance vector.
double average_variance(const ArrayXd& variances);

}  // namespace fracvamp
