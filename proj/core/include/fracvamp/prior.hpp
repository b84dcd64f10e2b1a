#pragma once

#include <functional>

#include "fracvamp/errors.hpp"

namespace fracvamp {

// Spike-and-slab signal prior: a component is zero with probability 1 - rho,
// otherwise drawn from a zero-mean Gaussian with variance active_variance.
struct BernoulliGaussPrior {
  double rho = 1.0;
  double active_variance = 1.0;

  void validate() const;
};

// First two moments and log normalizer of a tilted per-component density.
struct TiltedMoments {
  double mean;
  double variance;
  double log_partition;
};

// Posterior mean/variance of the density proportional to
//   p(x) * exp(x_tilde * x / v_tilde - x^2 / (2 v_tilde))
// for the spike-and-slab prior, in closed form. Responsibilities are formed
// in the log domain so extreme cavity values at the clip bounds stay finite.
TiltedMoments denoise(const BernoulliGaussPrior& prior, double x_tilde,
                      double v_tilde);

// Density description for the numeric oracle: a continuous part given by its
// log density plus an optional point mass at zero.
struct TiltedDensitySpec {
  std::function<double(double)> log_continuous;
  double point_mass_weight = 0.0;
  // Width scale of the continuous part; sets the integration window.
  double sigma_scale = 1.0;
};

// Quadrature reference for `denoise`: moments via adaptive Gauss-Kronrod
// integration of the tilted continuous part, point mass handled analytically.
// Independent of the closed form; used to certify it.
TiltedMoments denoise_numeric(const TiltedDensitySpec& density, double x_tilde,
                              double v_tilde);
TiltedMoments denoise_numeric(const BernoulliGaussPrior& prior, double x_tilde,
                              double v_tilde);

}  // namespace fracvamp
