#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracvamp/natural_params.hpp"
#include "fracvamp/rng.hpp"
#include "test_util.hpp"

using namespace fracvamp;
using testutil::max_rel_diff;

namespace {

NaturalParams params(std::initializer_list<double> lambda,
                     std::initializer_list<double> precision) {
  NaturalParams eta;
  eta.lambda = Eigen::Map<const ArrayXd>(lambda.begin(), lambda.size());
  eta.precision = Eigen::Map<const ArrayXd>(precision.begin(), precision.size());
  return eta;
}

}  // namespace

TEST_CASE("moment/natural conversion on pinned values") {
  const NaturalParams eta = moments_to_natural({ArrayXd::Constant(1, 2.0),
                                                ArrayXd::Constant(1, 4.0)});
  CHECK(eta.lambda[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eta.precision[0] == doctest::Approx(0.25).epsilon(1e-15));

  const NaturalParams zero_mean = moments_to_natural(
      {ArrayXd::Zero(1), ArrayXd::Constant(1, 1.0)});
  CHECK(zero_mean.lambda[0] == 0.0);
  CHECK(zero_mean.precision[0] == 1.0);

  const MomentParams m = natural_to_moments(params({0.5}, {0.25}));
  CHECK(m.mean[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(m.variance[0] == doctest::Approx(4.0).epsilon(1e-15));

  const MomentParams m2 = natural_to_moments(params({0.0}, {5.0}));
  CHECK(m2.mean[0] == 0.0);
  CHECK(m2.variance[0] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("conversion error paths") {
  CHECK_THROWS_AS(moments_to_natural({ArrayXd::Zero(2), ArrayXd::Zero(2)}),
                  std::domain_error);
  CHECK_THROWS_AS(natural_to_moments(params({1.0}, {0.0})), std::domain_error);
  // Negative precision (missed clip) surfaces as an error, not a silent NaN.
  CHECK_THROWS_AS(natural_to_moments(params({1.0}, {-2.0})), std::domain_error);
  CHECK_THROWS_AS(
      moments_to_natural({ArrayXd::Zero(2), ArrayXd::Ones(3)}),
      std::invalid_argument);
}

TEST_CASE("roundtrip natural<->moments is the identity") {
  Rng rng(81231);
  for (int rep = 0; rep < 50; ++rep) {
    MomentParams m;
    m.mean = testutil::random_array(rng, 64, -50.0, 50.0);
    m.variance = testutil::random_array(rng, 64, 1e-6, 1e6);
    const MomentParams back = natural_to_moments(moments_to_natural(m));
    CHECK(max_rel_diff(m.mean, back.mean) < 1e-12);
    CHECK(max_rel_diff(m.variance, back.variance) < 1e-12);
  }
}

TEST_CASE("ec cavity update is componentwise subtraction") {
  const NaturalParams cav =
      ec_cavity_update(params({3.0}, {2.0}), params({1.0}, {0.5}));
  CHECK(cav.lambda[0] == 2.0);
  CHECK(cav.precision[0] == 1.5);

  // Removing the full approximation leaves the flat (all-zero) message.
  const NaturalParams full = params({1.2, -0.5}, {2.0, 3.0});
  const NaturalParams flat = ec_cavity_update(full, full);
  CHECK(flat.lambda.abs().maxCoeff() == 0.0);
  CHECK(flat.precision.abs().maxCoeff() == 0.0);
}

TEST_CASE("fractional updates on pinned values") {
  const NaturalParams to_nle =
      frac_cavity_to_nle(params({4.0}, {2.0}), params({1.0}, {1.0}), 2.0);
  CHECK(to_nle.lambda[0] == 6.0);
  CHECK(to_nle.precision[0] == 2.0);

  const NaturalParams to_nle_half =
      frac_cavity_to_nle(params({4.0}, {2.0}), params({1.0}, {1.0}), 0.5);
  CHECK(to_nle_half.lambda[0] == 1.5);
  CHECK(to_nle_half.precision[0] == 0.5);

  const NaturalParams to_lin =
      frac_cavity_to_lin(params({5.0}, {4.0}), params({2.0}, {2.0}), 2.0);
  CHECK(to_lin.lambda[0] == 4.0);
  CHECK(to_lin.precision[0] == 3.0);

  CHECK_THROWS_AS(frac_cavity_to_nle(params({1.0}, {1.0}), params({0.0}, {0.0}), 0.0),
                  ConfigError);
  CHECK_THROWS_AS(frac_cavity_to_lin(params({1.0}, {1.0}), params({0.0}, {0.0}), -1.0),
                  ConfigError);
}

TEST_CASE("fractional updates with e=1 equal the ec update exactly") {
  Rng rng(4242);
  for (int rep = 0; rep < 20; ++rep) {
    NaturalParams a{testutil::random_array(rng, 32, -10.0, 10.0),
                    testutil::random_array(rng, 32, -5.0, 10.0)};
    NaturalParams b{testutil::random_array(rng, 32, -10.0, 10.0),
                    testutil::random_array(rng, 32, -5.0, 10.0)};
    const NaturalParams ec = ec_cavity_update(a, b);
    const NaturalParams f1 = frac_cavity_to_nle(a, b, 1.0);
    const NaturalParams f2 = frac_cavity_to_lin(a, b, 1.0);
    CHECK((ec.lambda == f1.lambda).all());
    CHECK((ec.precision == f1.precision).all());
    CHECK((ec.lambda == f2.lambda).all());
    CHECK((ec.precision == f2.precision).all());
  }
}

TEST_CASE("frac_cavity_to_lin approaches eta_nle for large e") {
  const NaturalParams eta_nle = params({5.0, -2.0}, {4.0, 1.5});
  const NaturalParams cav = params({2.0, 0.7}, {2.0, 0.3});
  const NaturalParams out = frac_cavity_to_lin(eta_nle, cav, 1e6);
  CHECK(max_rel_diff(out, eta_nle) < 1e-5);
}

TEST_CASE("combined fractional updates telescope across a random sequence") {
  // Chaining cav_lin = eta_nle - cav_nle/e and cav_nle' = e (eta_lin' - cav_lin)
  // must give cav_nle' = e (eta_lin' - eta_nle) + cav_nle.
  Rng rng(777);
  const Index n = 16;
  for (double e : {0.5, 1.0, 1.7, 3.0}) {
    NaturalParams cav_nle{testutil::random_array(rng, n, -2.0, 2.0),
                          testutil::random_array(rng, n, 0.1, 3.0)};
    for (int k = 0; k < 20; ++k) {
      NaturalParams eta_nle{testutil::random_array(rng, n, -5.0, 5.0),
                            testutil::random_array(rng, n, 0.5, 8.0)};
      NaturalParams eta_lin{testutil::random_array(rng, n, -5.0, 5.0),
                            testutil::random_array(rng, n, 0.5, 8.0)};
      const NaturalParams cav_lin = frac_cavity_to_lin(eta_nle, cav_nle, e);
      const NaturalParams next = frac_cavity_to_nle(eta_lin, cav_lin, e);
      const NaturalParams expect{
          e * (eta_lin.lambda - eta_nle.lambda) + cav_nle.lambda,
          e * (eta_lin.precision - eta_nle.precision) + cav_nle.precision};
      CHECK(max_rel_diff(next, expect) < 1e-12);
      cav_nle = next;
    }
  }
}

TEST_CASE("clip pinned cases") {
  const ClipBounds bounds;

  SUBCASE("upper bound with mean preservation") {
    long events = 0;
    const NaturalParams out =
        clip(params({3e10}, {1e10}), bounds, ClipKind::Nle, &events);
    CHECK(out.precision[0] == 1e8);
    CHECK(out.lambda[0] == doctest::Approx(3e8).epsilon(1e-12));
    CHECK(events == 1);
  }
  SUBCASE("negative precision rescued to the lower bound") {
    const NaturalParams out = clip(params({0.4}, {-3.0}), bounds, ClipKind::Other);
    CHECK(out.precision[0] == 1e-12);
    CHECK(out.lambda[0] == 0.0);
  }
  SUBCASE("interior point untouched") {
    long events = 0;
    const NaturalParams out =
        clip(params({0.7}, {1.0}), bounds, ClipKind::Nle, &events);
    CHECK(out.precision[0] == 1.0);
    CHECK(out.lambda[0] == 0.7);
    CHECK(events == 0);
  }
  SUBCASE("kind selects the interval") {
    const NaturalParams eta = params({1.0}, {1e-10});
    CHECK(clip(eta, bounds, ClipKind::Nle).precision[0] == 1e-8);
    CHECK(clip(eta, bounds, ClipKind::Other).precision[0] == 1e-10);
  }
}

TEST_CASE("clip is idempotent and preserves positive-precision means") {
  Rng rng(90125);
  const ClipBounds bounds;
  for (int rep = 0; rep < 100; ++rep) {
    NaturalParams eta{testutil::random_array(rng, 40, -1e3, 1e3),
                      testutil::random_array(rng, 40, -1e2, 1e10)};
    for (ClipKind kind : {ClipKind::Nle, ClipKind::Other}) {
      const NaturalParams once = clip(eta, bounds, kind);
      const NaturalParams twice = clip(once, bounds, kind);
      CHECK((once.lambda == twice.lambda).all());
      CHECK((once.precision == twice.precision).all());

      for (Index j = 0; j < eta.size(); ++j) {
        if (eta.precision[j] > 0.0 && once.precision[j] > 0.0) {
          const double mean_before = eta.lambda[j] / eta.precision[j];
          const double mean_after = once.lambda[j] / once.precision[j];
          CHECK(testutil::rel_diff(mean_before, mean_after) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("clip bound validation") {
  ClipBounds bad;
  bad.nle = {0.0, 1.0};
  CHECK_THROWS_AS(clip(params({1.0}, {1.0}), bad, ClipKind::Nle), ConfigError);
  bad.nle = {2.0, 1.0};
  CHECK_THROWS_AS(clip(params({1.0}, {1.0}), bad, ClipKind::Nle), ConfigError);
}

TEST_CASE("average_variance") {
  ArrayXd v(3);
  v << 1.0, 2.0, 3.0;
  CHECK(average_variance(v) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(average_variance(ArrayXd::Constant(17, 0.31)) ==
        doctest::Approx(0.31).epsilon(1e-15));
  CHECK_THROWS_AS(average_variance(ArrayXd()), std::domain_error);

  Rng rng(5150);
  for (int rep = 0; rep < 20; ++rep) {
    const ArrayXd xs = testutil::random_array(rng, 257, 1e-8, 1e8);
    const double expect = testutil::compensated_sum(xs) / xs.size();
    CHECK(testutil::rel_diff(average_variance(xs), expect) < 1e-12);
  }
}
