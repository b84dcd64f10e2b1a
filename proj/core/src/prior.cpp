#include "fracvamp/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fracvamp {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

void require_positive_cavity_variance(double v_tilde) {
  if (!(v_tilde > 0.0)) {
    throw std::domain_error("denoise: cavity variance must be > 0, got " +
                            std::to_string(v_tilde));
  }
}

}  // namespace

void BernoulliGaussPrior::validate() const {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw ConfigError("BernoulliGaussPrior: rho must lie in (0, 1], got " +
                      std::to_string(rho));
  }
  if (!(active_variance > 0.0)) {
    throw ConfigError("BernoulliGaussPrior: active_variance must be > 0");
  }
}

TiltedMoments denoise(const BernoulliGaussPrior& prior, double x_tilde,
                      double v_tilde) {
  prior.validate();
  require_positive_cavity_variance(v_tilde);

  const double va = prior.active_variance;

  // Slab times tilt is again Gaussian:
  //   posterior variance  vp = va * vt / (va + vt)
  //   posterior mean      mp = x~ * va / (va + vt)
  const double vp = va * v_tilde / (va + v_tilde);
  const double mp = x_tilde * va / (va + v_tilde);

  // Log evidence of each mixture branch under the tilt. The spike sits at
  // x = 0 where the tilt is 1, so its log evidence is just log(1 - rho).
  const double log_slab = std::log(prior.rho) +
                          0.5 * std::log(v_tilde / (va + v_tilde)) +
                          x_tilde * x_tilde * va / (2.0 * v_tilde * (va + v_tilde));
  const double log_spike = (prior.rho == 1.0)
                               ? -std::numeric_limits<double>::infinity()
                               : std::log1p(-prior.rho);

  // Slab responsibility w = 1 / (1 + exp(log_spike - log_slab)), stable form.
  const double t = log_spike - log_slab;
  double w;
  if (t > 0.0) {
    const double et = std::exp(-t);
    w = et / (1.0 + et);
  } else {
    w = 1.0 / (1.0 + std::exp(t));
  }

  TiltedMoments out;
  out.mean = w * mp;
  out.variance = w * vp + w * (1.0 - w) * mp * mp;
  out.log_partition = std::max(log_spike, log_slab) +
                      std::log1p(std::exp(-std::abs(t)));
  return out;
}

namespace {

// Shared scan of the log integrand: locates the peak, estimates its width,
// and yields panel breakpoints so the adaptive quadrature cannot miss a
// narrow bump inside a wide window.
struct IntegrandScan {
  double peak_x = 0.0;
  double peak_log = 0.0;
  std::vector<double> breakpoints;
};

IntegrandScan scan_log_integrand(const std::function<double(double)>& g,
                                 double lo, double hi) {
  constexpr int kScanPoints = 2048;
  const double h = (hi - lo) / (kScanPoints - 1);

  IntegrandScan scan;
  scan.peak_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScanPoints; ++i) {
    const double x = lo + i * h;
    const double gx = g(x);
    if (gx > scan.peak_log) {
      scan.peak_log = gx;
      scan.peak_x = x;
    }
  }

  // Width from the local curvature; for a Gaussian bump
  // g(x0 +/- h) - g(x0) = -h^2 / (2 sigma^2).
  const double drop = scan.peak_log -
                      0.5 * (g(scan.peak_x - h) + g(scan.peak_x + h));
  double width = (drop > 0.0 && std::isfinite(drop))
                     ? h / std::sqrt(2.0 * drop)
                     : (hi - lo) / 4.0;
  width = std::clamp(width, h, hi - lo);

  std::vector<double> pts = {lo,
                             scan.peak_x - 12.0 * width,
                             scan.peak_x - width,
                             scan.peak_x + width,
                             scan.peak_x + 12.0 * width,
                             0.0,
                             hi};
  std::sort(pts.begin(), pts.end());
  for (double p : pts) {
    p = std::clamp(p, lo, hi);
    if (scan.breakpoints.empty() || p > scan.breakpoints.back()) {
      scan.breakpoints.push_back(p);
    }
  }
  return scan;
}

}  // namespace

TiltedMoments denoise_numeric(const TiltedDensitySpec& density, double x_tilde,
                              double v_tilde) {
  require_positive_cavity_variance(v_tilde);
  if (!density.log_continuous) {
    throw std::invalid_argument("denoise_numeric: missing continuous density");
  }
  if (density.point_mass_weight < 0.0) {
    throw std::invalid_argument("denoise_numeric: negative point mass");
  }

  const auto g = [&](double x) {
    return density.log_continuous(x) + x_tilde * x / v_tilde -
           x * x / (2.0 * v_tilde);
  };

  // Window: +/- 12 widths around zero, extended to cover the tilt-shifted
  // bump. Truncation error of a Gaussian 12 sigma out is ~1e-32.
  const double sig = std::max(density.sigma_scale, std::sqrt(v_tilde));
  const double shift = x_tilde;  // bump center never lies past the tilt center
  const double lo = std::min(-12.0 * sig, shift - 12.0 * sig);
  const double hi = std::max(12.0 * sig, shift + 12.0 * sig);

  const IntegrandScan scan = scan_log_integrand(g, lo, hi);
  const double offset = scan.peak_log;

  // The Kronrod error estimate is very pessimistic and inflates with depth;
  // depth 8 on the peak-localized panels already reaches ~1e-14 true error.
  // Each integral is checked against its own L1 mass.
  using quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double tol = 1e-12;
  const auto integrate = [&](const std::function<double(double)>& f) {
    double total = 0.0, err_sum = 0.0, l1_sum = 0.0;
    for (std::size_t i = 0; i + 1 < scan.breakpoints.size(); ++i) {
      double err = 0.0, l1 = 0.0;
      total += quad::integrate(f, scan.breakpoints[i], scan.breakpoints[i + 1],
                               8, tol, &err, &l1);
      err_sum += err;
      l1_sum += l1;
    }
    if (err_sum > 1e-7 * l1_sum) {
      throw NumericError(
          "denoise_numeric: quadrature did not converge (rel err " +
          std::to_string(err_sum / l1_sum) + ") at x_tilde=" +
          std::to_string(x_tilde) + " v_tilde=" + std::to_string(v_tilde));
    }
    return total;
  };

  const double m0 = integrate([&](double x) { return std::exp(g(x) - offset); });
  const double m1 =
      integrate([&](double x) { return x * std::exp(g(x) - offset); });

  // Point mass at zero: tilt evaluates to 1 there, so its scaled weight is
  // point_mass_weight * exp(-offset). Underflow just means it is negligible.
  const double spike = density.point_mass_weight * std::exp(-offset);

  const double z = spike + m0;
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw NumericError("denoise_numeric: degenerate normalizer at x_tilde=" +
                       std::to_string(x_tilde) + " v_tilde=" +
                       std::to_string(v_tilde));
  }

  TiltedMoments out;
  out.mean = m1 / z;
  // Second pass with central moments; avoids the m2 - mean^2 cancellation.
  const double m2c = integrate([&](double x) {
    const double d = x - out.mean;
    return d * d * std::exp(g(x) - offset);
  });
  out.variance = (m2c + spike * out.mean * out.mean) / z;
  out.log_partition = offset + std::log(z);
  return out;
}

TiltedMoments denoise_numeric(const BernoulliGaussPrior& prior, double x_tilde,
                              double v_tilde) {
  prior.validate();
  const double va = prior.active_variance;
  const double rho = prior.rho;
  TiltedDensitySpec spec;
  spec.log_continuous = [rho, va](double x) {
    return std::log(rho) - 0.5 * (kLogTwoPi + std::log(va)) -
           x * x / (2.0 * va);
  };
  spec.point_mass_weight = 1.0 - rho;
  spec.sigma_scale = std::sqrt(va);
  return denoise_numeric(spec, x_tilde, v_tilde);
}

}  // namespace fracvamp
